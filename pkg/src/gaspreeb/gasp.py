"""Gradient-aware shortest path embedding of Reeb graph arcs.

Each regular arc is routed through a leveled graph: one level of
candidate points per isocontour of its cylinder, joined only between
neighboring levels, so the shortest path can never go back down the
function. A coarse pass is followed by refinement passes that resample
around the previous path. Arcs whose function span is below the contour
spacing are instead routed along mesh edges of the cut region, with
local subdivision to straighten them.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .arcs import REGULAR_BOUNDARY, REGULAR_INTERIOR, THIN, EmbeddedArc, assemble
from .candidates import boundary_candidates, interior_candidates
from .contour import marching_contour
from .decomposition import DEFAULT_BINS, Decomposer, edge_epsilon
from .exceptions import ThinFeatureError, TopologyError
from .pathgraph import polyline_length, shortest_arc

logger = logging.getLogger(__name__)

BOUNDARY = "boundary"
INTERIOR = "interior"


@dataclass(frozen=True)
class GaspParams:
    """Embedding parameters.

    Parameters
    ----------
    spacing : float
        Target gap between consecutive contours, in function units.
    buffer : float
        Minimum in-plane distance of interior candidates from their
        contour, in model units. Ignored in boundary mode.
    budget : int
        Maximum candidate points per contour per pass.
    refinements : int
        Number of refinement passes after the coarse one.
    thin_iterations : int
        Maximum subdivision rounds for thin arcs.
    """

    spacing: float = 0.05
    buffer: float = 0.05
    budget: int = 40
    refinements: int = 2
    thin_iterations: int = 5

    def __post_init__(self):
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not (self.buffer >= 0 and math.isfinite(self.buffer)):
            raise ValueError(f"buffer must be non-negative, got {self.buffer}")
        if self.budget < 4:
            raise ValueError(f"budget must be at least 4, got {self.budget}")
        if self.refinements < 0:
            raise ValueError(f"refinements must be non-negative, got {self.refinements}")
        if self.thin_iterations < 1:
            raise ValueError(f"thin_iterations must be positive, got {self.thin_iterations}")


def contour_count(f_j, f_k, spacing):
    """Number of contours ``ceil((f_k - f_j) / spacing + 1)``.

    Raises :class:`ThinFeatureError` when the span is below ``spacing``.
    """
    span = f_k - f_j
    if not span > 0:
        raise ValueError("f_k must exceed f_j")
    if span < spacing:
        raise ThinFeatureError(span, spacing)
    return math.ceil(span / spacing + 1)


def contour_isovalues(f_j, f_k, n):
    """``n`` values evenly spread over the cylinder of an arc.

    The cylinder rims sit at ``f_j + eps`` and ``f_k - eps``; the end
    contours are moved half a gap further in so they never touch a rim.
    """
    eps = edge_epsilon(f_j, f_k)
    return np.linspace(f_j + 1.5 * eps, f_k - 1.5 * eps, n)


def embed_regular(cylinder, start, end, f_j, f_k, params, mode=BOUNDARY):
    """Embed one arc through the contours of ``cylinder``."""
    n = contour_count(f_j, f_k, params.spacing)
    isos = contour_isovalues(f_j, f_k, n)
    contours = [marching_contour(cylinder, v) for v in isos]
    budget = params.budget
    if mode == BOUNDARY:
        cands = [boundary_candidates(c, budget) for c in contours]
    else:
        cands = [interior_candidates(c, params.buffer, budget) for c in contours]
    path, _ = shortest_arc([c.points for c in cands], start, end)
    lengths = [polyline_length(path)]
    for _ in range(params.refinements):
        windows = []
        for i, c in enumerate(contours):
            width = 4.0 * c.length / budget
            if mode == BOUNDARY:
                windows.append(boundary_candidates(c, budget, (path[i + 1], width)))
            else:
                windows.append(interior_candidates(c, params.buffer, budget,
                                                   (cands[i], path[i + 1], width)))
        cands = windows
        path, _ = shortest_arc([c.points for c in cands], start, end)
        lengths.append(polyline_length(path))
    kind = REGULAR_BOUNDARY if mode == BOUNDARY else REGULAR_INTERIOR
    iso = np.r_[f_j, isos, f_k]
    return EmbeddedArc(cylinder.edge, -1, -1, -1, path, iso, kind, tuple(lengths),
                       {"contours": n, "modes": [c.mode for c in cands]})


# thin arcs ------------------------------------------------------------------


def _edge_graph(vertices, triangles, extra=None):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    if extra is not None:
        e = np.vstack([e, extra])
    e = np.unique(np.sort(e, axis=1), axis=0)
    w = np.linalg.norm(vertices[e[:, 0]] - vertices[e[:, 1]], axis=1)
    n = len(vertices)
    return sparse.coo_matrix((w, (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()


def edge_path(vertices, triangles, source, target, extra=None):
    """Vertex ids of the shortest edge path, or None when disconnected.

    ``extra`` optionally lists additional (i, j) edges.
    """
    g = _edge_graph(vertices, triangles, extra)
    dist, pred = dijkstra(g, directed=False, indices=source, return_predecessors=True)
    if not np.isfinite(dist[target]):
        return None
    path = [target]
    while path[-1] != source:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def subdivide_around(vertices, values, triangles, touched):
    """1-to-4 midpoint split of the triangles flagged in ``touched``.

    Neighbors are left alone, so split edges form T-junctions; every new
    vertex still lies on an original edge, hence on the surface.
    """
    sel = triangles[touched]
    if len(sel) == 0:
        return vertices, values, triangles
    pairs = np.sort(np.concatenate([sel[:, [0, 1]], sel[:, [1, 2]], sel[:, [2, 0]]]), axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mid_ids = len(vertices) + np.arange(len(uniq))
    new_v = np.vstack([vertices, 0.5 * (vertices[uniq[:, 0]] + vertices[uniq[:, 1]])])
    new_f = np.r_[values, 0.5 * (values[uniq[:, 0]] + values[uniq[:, 1]])]
    k = len(sel)
    m01, m12, m20 = mid_ids[inv[:k]], mid_ids[inv[k:2 * k]], mid_ids[inv[2 * k:]]
    a, b, c = sel[:, 0], sel[:, 1], sel[:, 2]
    split = np.concatenate([
        np.stack([a, m01, m20], axis=1),
        np.stack([m01, b, m12], axis=1),
        np.stack([m20, m12, c], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])
    return new_v, new_f, np.vstack([triangles[~touched], split])


def refine_edge_path(vertices, values, triangles, source, target, max_iter=5, extra=None):
    """Shortest edge path with subdivision around it until it stops shrinking.

    Returns ``(points, values, lengths, iterations)``; ``lengths[0]`` is the
    unrefined path and every later entry is strictly smaller. ``extra``
    edges take part in every search but are never split.
    """
    path = edge_path(vertices, triangles, source, target, extra)
    if path is None:
        return None
    lengths = [polyline_length(vertices[path])]
    best = (vertices[path], values[path])
    it = 0
    while it < max_iter:
        it += 1
        touched = np.isin(triangles, path).any(axis=1)
        vertices, values, triangles = subdivide_around(vertices, values, triangles, touched)
        path = edge_path(vertices, triangles, source, target, extra)
        length = polyline_length(vertices[path])
        if not length < lengths[-1] * (1 - 1e-12):
            break
        lengths.append(length)
        best = (vertices[path], values[path])
    return best[0], best[1], tuple(lengths), it


def _fallback_patch(mesh, field, cylinder, v_src, v_dst):
    """Validated cylinder plus fans joining each rim to its critical vertex.

    Rim vertices created inside a triangle of the critical vertex's star
    get a straight edge to it; that segment stays inside the star
    triangle, so the patch remains on the surface.
    """
    cm = cylinder.mesh
    verts = np.vstack([cm.vertices, mesh.vertices[[v_src, v_dst]]])
    vals = np.r_[cylinder.values, field.values[[v_src, v_dst]]]
    s_id, d_id = len(cm.vertices), len(cm.vertices) + 1
    extra = []
    for vid, rim_code, crit in ((s_id, 1, v_src), (d_id, 2, v_dst)):
        star = np.flatnonzero((mesh.triangles == crit).any(axis=1))
        t_in = np.isin(cylinder.source_triangle, star)
        rim_v = np.unique(cm.triangles[t_in])
        rim_v = rim_v[cylinder.rim[rim_v] == rim_code]
        extra.append(np.stack([np.full(len(rim_v), vid), rim_v], axis=1))
    return verts, vals, cm.triangles, s_id, d_id, np.vstack(extra)


def embed_thin(mesh, field, reeb, edge, params, decomposer=None):
    """Arc of a thin Reeb edge routed over mesh edges of its cut region."""
    dec = decomposer or Decomposer(mesh, field, reeb)
    e = reeb.edges[edge]
    nj, nk = reeb.nodes[e.src], reeb.nodes[e.dst]
    result = None
    try:
        cyl = dec.extract_group(e.src, e.dst, thin=True)[edge]
        s = np.flatnonzero(cyl.source_vertex == nj.vertex)
        t = np.flatnonzero(cyl.source_vertex == nk.vertex)
        if len(s) and len(t):
            result = refine_edge_path(cyl.mesh.vertices, cyl.values, cyl.mesh.triangles,
                                      int(s[0]), int(t[0]), params.thin_iterations)
    except TopologyError as exc:
        logger.info("thin cut of edge %d failed (%s); using validated cylinder", edge, exc)
    if result is None:
        cyl = dec.extract_group(e.src, e.dst)[edge]
        verts, vals, tris, s, t, extra = _fallback_patch(mesh, field, cyl, nj.vertex, nk.vertex)
        result = refine_edge_path(verts, vals, tris, s, t, params.thin_iterations, extra)
        if result is None:
            raise TopologyError(f"thin edge {edge}: critical points not connected in cut region")
    pts, vals, lengths, iters = result
    return EmbeddedArc(edge, e.src, e.dst, e.instance, pts, vals, THIN, lengths,
                       {"iterations": iters})


# driver ---------------------------------------------------------------------


def _embed_group(dec, key, params, mode):
    reeb, mesh, field = dec.reeb, dec.mesh, dec.field
    src, dst = key
    nj, nk = reeb.nodes[src], reeb.nodes[dst]
    ids = reeb.groups()[key]
    if nk.value - nj.value < params.spacing:
        return [embed_thin(mesh, field, reeb, i, params, dec) for i in ids]
    cyls = dec.extract_group(src, dst)
    start, end = np.asarray(nj.position), np.asarray(nk.position)
    return [embed_regular(cyls[i], start, end, nj.value, nk.value, params, mode) for i in ids]


def gasp_embed(mesh, field, reeb, params=None, mode=BOUNDARY, threads=1, n_bins=DEFAULT_BINS,
               decomposer=None):
    """Embed every arc of ``reeb``; independent of ``threads``."""
    params = params or GaspParams()
    if mode not in (BOUNDARY, INTERIOR):
        raise ValueError(f"mode must be {BOUNDARY!r} or {INTERIOR!r}")
    dec = decomposer or Decomposer(mesh, field, reeb, n_bins)
    keys = list(reeb.groups())
    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda k: _embed_group(dec, k, params, mode), keys))
    else:
        chunks = [_embed_group(dec, k, params, mode) for k in keys]
    arcs = [a for chunk in chunks for a in chunk]
    meta = asdict(params)
    meta["mode"] = mode
    if mode == BOUNDARY:
        meta.pop("buffer")
    return assemble(reeb, arcs, f"gasp-{mode}", meta)
