"""Cut the mesh into one topological cylinder per Reeb edge."""

import enum
import os
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .exceptions import TopologyError
from .mesh import TriangleMesh, save_obj

DEFAULT_BINS = 20


class Side(enum.Enum):
    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True)
class TriangleBins:
    """Triangles grouped by the function range they overlap."""

    boundaries: np.ndarray
    contents: tuple
    tri_min: np.ndarray
    tri_max: np.ndarray

    @property
    def n_bins(self):
        return len(self.contents)


def build_bins(mesh, field, n_bins=DEFAULT_BINS):
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    fv = field.values[mesh.triangles]
    tmin, tmax = fv.min(axis=1), fv.max(axis=1)
    bd = np.linspace(field.values.min(), field.values.max(), n_bins + 1)
    first = np.clip(np.searchsorted(bd, tmin, side="right") - 1, 0, n_bins - 1)
    last = np.clip(np.searchsorted(bd, tmax, side="left") - 1, 0, n_bins - 1)
    last = np.maximum(last, first)
    counts = last - first + 1
    tri = np.repeat(np.arange(len(tmin)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    b = np.repeat(first, counts) + offs
    order = np.argsort(b, kind="stable")
    split = np.searchsorted(b[order], np.arange(1, n_bins))
    contents = tuple(np.split(tri[order], split))
    return TriangleBins(bd, contents, tmin, tmax)


def rough_cut(bins, lower, upper):
    """Triangles of every bin overlapping ``[lower, upper]`` (sorted ids)."""
    if not lower < upper:
        raise ValueError("rough_cut needs lower < upper")
    bd = bins.boundaries
    sel = [c for b, c in enumerate(bins.contents) if bd[b] <= upper and bd[b + 1] >= lower]
    if not sel:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(sel))


class _Vertex:
    __slots__ = ("key", "pos", "val")

    def __init__(self, key, pos, val):
        self.key, self.pos, self.val = key, pos, val


def _crossing(a, b, iso, tag):
    t = (iso - a.val) / (b.val - a.val)
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    return _Vertex((frozenset((a.key, b.key)), tag), a.pos + t * (b.pos - a.pos), iso)


def _cut(tri, iso, side, tag=None):
    """Clip one triangle of :class:`_Vertex` records against ``iso``.

    A vertex counts as below when ``f <= iso``. Output keeps the input
    orientation; zero-area pieces are dropped.
    """
    keep = [(v.val > iso) == (side is Side.ABOVE) for v in tri]
    k = sum(keep)
    if k == 3:
        return [tri]
    if k == 0:
        return []
    if k == 1:
        i = keep.index(True)
        a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
        out = [(a, _crossing(a, b, iso, tag), _crossing(a, c, iso, tag))]
    else:
        i = keep.index(False)
        c, a, b = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
        p_bc, p_ca = _crossing(b, c, iso, tag), _crossing(a, c, iso, tag)
        out = [(a, b, p_bc), (a, p_bc, p_ca)]
    return [t for t in out if len({v.key for v in t}) == 3 and _area(t) > 0.0]


def _area(t):
    return 0.5 * np.linalg.norm(np.cross(t[1].pos - t[0].pos, t[2].pos - t[0].pos))


def cut_triangle(points, values, isovalue, side):
    """Cut a single triangle at ``isovalue`` keeping one side.

    Returns a list of 0, 1 or 2 triangles, each an array of shape (3, 3).
    """
    side = Side(side) if not isinstance(side, Side) else side
    pts = np.asarray(points, dtype=np.float64)
    recs = [_Vertex(("v", i), pts[i], float(values[i])) for i in range(3)]
    return [np.array([v.pos for v in t]) for t in _cut(recs, isovalue, side)]


@dataclass(frozen=True)
class TopologicalCylinder:
    """Sub-mesh carried by one Reeb edge between two cut levels.

    ``source_triangle[i]`` is the input-mesh triangle that cut triangle
    ``i`` came from; ``source_vertex[v]`` is the input vertex id or -1
    for vertices created by a cut; ``rim[v]`` is 1 on the lower cut, 2
    on the upper cut and 0 elsewhere.
    """

    edge: int
    mesh: TriangleMesh
    values: np.ndarray
    source_triangle: np.ndarray
    source_vertex: np.ndarray
    rim: np.ndarray
    lower: float
    upper: float
    src_vertex: int
    dst_vertex: int

    @property
    def n_triangles(self):
        return self.mesh.n_triangles

    def save_obj(self, path):
        save_obj(self.mesh, path)


def edge_epsilon(f_lo, f_hi):
    return max(1e-4 * (f_hi - f_lo), 1e-9)


def clip_slab(mesh, field, triangles, lower, upper):
    """Cut ``triangles`` of ``mesh`` to the slab ``lower < f <= upper``.

    The source cut (keep above ``lower``) is applied first, then the
    destination cut (keep below ``upper``). Rim vertices are shared
    between neighboring cut triangles. Returns
    ``(vertices, values, tris, source_triangle, source_vertex, rim)``.
    """
    tris = np.asarray(triangles, dtype=np.int64)
    f = field.values
    fv = f[mesh.triangles[tris]]
    tmin, tmax = fv.min(axis=1), fv.max(axis=1)
    live = (tmax > lower) & (tmin <= upper)
    tris, tmin, tmax = tris[live], tmin[live], tmax[live]
    whole = (tmin > lower) & (tmax <= upper)

    keys, pos, vals, srcv, rim = {}, [], [], [], []

    def vid(rec):
        idx = keys.get(rec.key)
        if idx is None:
            idx = keys[rec.key] = len(pos)
            pos.append(rec.pos)
            vals.append(rec.val)
            if rec.key[0] == "v":
                srcv.append(rec.key[1])
                rim.append(0)
            else:
                srcv.append(-1)
                rim.append(1 if rec.key[1] == "lo" else 2)
        return idx

    # untouched triangles keep their original vertices
    whole_tris = tris[whole]
    used = np.unique(mesh.triangles[whole_tris])
    for v in used.tolist():
        keys[("v", v)] = len(pos)
        pos.append(mesh.vertices[v])
        vals.append(f[v])
        srcv.append(v)
        rim.append(0)
    remap = np.full(mesh.n_vertices, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    out_tris = [remap[mesh.triangles[whole_tris]]]
    out_src = [whole_tris]

    cut_tris, cut_src = [], []
    for t in tris[~whole].tolist():
        recs = [_Vertex(("v", v), mesh.vertices[v], f[v]) for v in mesh.triangles[t]]
        for piece in _cut(recs, lower, Side.ABOVE, "lo"):
            for final in _cut(list(piece), upper, Side.BELOW, "hi"):
                cut_tris.append([vid(r) for r in final])
                cut_src.append(t)
    if cut_tris:
        out_tris.append(np.asarray(cut_tris, dtype=np.int64))
        out_src.append(np.asarray(cut_src, dtype=np.int64))
    return (
        np.asarray(pos, dtype=np.float64).reshape(-1, 3),
        np.asarray(vals, dtype=np.float64),
        np.concatenate(out_tris).reshape(-1, 3),
        np.concatenate(out_src),
        np.asarray(srcv, dtype=np.int64),
        np.asarray(rim, dtype=np.int8),
    )


def triangle_components(triangles, n_vertices):
    """Edge-connected components of a triangle list."""
    t = np.asarray(triangles, dtype=np.int64)
    if len(t) == 0:
        return 0, np.zeros(0, dtype=np.int64)
    half = np.sort(np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1).reshape(-1, 2), axis=1)
    key = half[:, 0] * (n_vertices + 1) + half[:, 1]
    order = np.argsort(key, kind="stable")
    ks = key[order]
    same = np.flatnonzero(ks[1:] == ks[:-1])
    tri = np.repeat(np.arange(len(t)), 3)[order]
    a, b = tri[same], tri[same + 1]
    g = sparse.coo_matrix((np.ones(len(a)), (a, b)), shape=(len(t), len(t)))
    return connected_components(g, directed=False)


def _submesh(vertices, values, tris, src_tri, src_vert, rim, sel):
    sub = tris[sel]
    used = np.unique(sub)
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return (TriangleMesh(vertices[used], remap[sub]), values[used], src_tri[sel],
            src_vert[used], rim[used])


class Decomposer:
    """Shared per-mesh state for cutting cylinders (read-only after init)."""

    def __init__(self, mesh, field, reeb, n_bins=DEFAULT_BINS):
        self.mesh, self.field, self.reeb = mesh, field, reeb
        self.bins = build_bins(mesh, field, n_bins)
        self.critical = np.zeros(mesh.n_vertices, dtype=bool)
        self.critical[[n.vertex for n in reeb.nodes]] = True
        self._star = {n.vertex: np.flatnonzero((mesh.triangles == n.vertex).any(axis=1))
                      for n in reeb.nodes}

    def star(self, v):
        """Triangles incident to critical vertex ``v``."""
        return self._star[v]

    def reach(self, v, gap):
        """Star of ``v`` widened across the cut gap.

        ``gap`` flags vertices strictly between ``v`` and its cut level.
        A close neighbor can sit in that gap, leaving a whole wedge of the
        star outside the slab; the triangles around every gap vertex
        connected to ``v`` through gap vertices are then included too.
        """
        if not gap.any():
            return self.star(v)
        keep = gap.copy()
        keep[v] = True
        idx = np.flatnonzero(keep)
        sub = self.mesh.adjacency[idx][:, idx]
        _, labels = connected_components(sub, directed=False)
        members = idx[labels == labels[np.searchsorted(idx, v)]]
        if len(members) == 1:
            return self.star(v)
        hit = np.zeros(self.mesh.n_vertices, dtype=bool)
        hit[members] = True
        return np.flatnonzero(hit[self.mesh.triangles].any(axis=1))

    def slab(self, lower, upper):
        cand = rough_cut(self.bins, lower, upper)
        return clip_slab(self.mesh, self.field, cand, lower, upper)

    def candidates(self, src, dst, lower, upper):
        """Connected pieces of the slab, each with its validation verdict.

        Returns a list of dicts with keys ``sel`` (triangle mask),
        ``touches_src``, ``touches_dst``, ``extra_critical`` and ``order``.
        """
        vertices, values, tris, src_tri, src_vert, rim = self.slab(lower, upper)
        n, labels = triangle_components(tris, len(vertices))
        f = self.field.values
        star_j = np.isin(src_tri, self.reach(src, (f > f[src]) & (f <= lower)))
        star_k = np.isin(src_tri, self.reach(dst, (f >= upper) & (f < f[dst])))
        crit = np.zeros(len(vertices), dtype=bool)
        orig = src_vert >= 0
        crit[orig] = self.critical[src_vert[orig]]
        crit[src_vert == src] = False
        crit[src_vert == dst] = False
        out = []
        for c in range(n):
            sel = labels == c
            verts = np.unique(tris[sel])
            out.append({
                "sel": sel,
                "touches_src": bool(star_j[sel].any()),
                "touches_dst": bool(star_k[sel].any()),
                "extra_critical": np.unique(src_vert[verts][crit[verts]]).tolist(),
                "order": int(src_tri[sel].min()),
            })
        return out, (vertices, values, tris, src_tri, src_vert, rim)

    def extract_group(self, src, dst, thin=False, eps=None):
        """Cylinders for every Reeb edge between nodes ``src`` and ``dst``.

        Returns ``{edge index: TopologicalCylinder}``. With ``thin`` the
        cuts sit exactly at the critical values. Raises
        :class:`TopologyError` when the number of valid pieces differs from
        the number of parallel edges.
        """
        edge_ids = self.reeb.groups()[(src, dst)]
        nj, nk = self.reeb.nodes[src], self.reeb.nodes[dst]
        if thin:
            lower, upper = nj.value, nk.value
        else:
            eps = edge_epsilon(nj.value, nk.value) if eps is None else eps
            lower, upper = nj.value + eps, nk.value - eps
        pieces, arrays = self.candidates(nj.vertex, nk.vertex, lower, upper)
        valid = [p for p in pieces if p["touches_src"] and p["touches_dst"] and not p["extra_critical"]]
        valid.sort(key=lambda p: p["order"])
        if len(valid) != len(edge_ids):
            raise TopologyError(
                f"Reeb edge {nj.vertex}->{nk.vertex}: {len(valid)} valid cylinder(s) "
                f"for {len(edge_ids)} edge instance(s)"
            )
        out = {}
        for eid, piece in zip(edge_ids, valid):
            mesh, values, s_tri, s_vert, rim = _submesh(*arrays, piece["sel"])
            out[eid] = TopologicalCylinder(eid, mesh, values, s_tri, s_vert, rim,
                                           lower, upper, nj.vertex, nk.vertex)
        return out

    def extract_all(self):
        out = {}
        for src, dst in self.reeb.groups():
            out.update(self.extract_group(src, dst))
        return dict(sorted(out.items()))


def extract_cylinder(mesh, field, reeb, edge, eps=None, n_bins=DEFAULT_BINS, decomposer=None):
    """Cylinder of a single Reeb edge; its duplicity group is resolved together."""
    dec = decomposer or Decomposer(mesh, field, reeb, n_bins)
    e = reeb.edges[edge]
    return dec.extract_group(e.src, e.dst, eps=eps)[edge]


def dump_cylinders(cylinders, directory):
    """Write each cylinder to ``cylinder_<edge>.obj`` for inspection."""
    os.makedirs(directory, exist_ok=True)
    for eid, cyl in cylinders.items():
        cyl.save_obj(os.path.join(directory, f"cylinder_{eid}.obj"))
