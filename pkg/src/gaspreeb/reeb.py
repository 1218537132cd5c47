"""Critical point classification and Reeb graph construction.

The constructor sweeps "midlevel slabs": between consecutive critical
values the level sets do not change topology, so it suffices to look at
one level per gap. Each slab between two midlevels holds exactly one
critical vertex; its connected pieces either carry that vertex (and wire
the contour components entering and leaving it) or are plain tubes that
pass one lower contour component to one upper one. Chaining components
through the tubes yields the Reeb edges, with parallel edges kept.
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .exceptions import TopologyError

logger = logging.getLogger(__name__)


class VertexKind(enum.Enum):
    REGULAR = "regular"
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SADDLE = "saddle"


@dataclass(frozen=True)
class CriticalPoint:
    vertex: int
    position: tuple
    value: float
    kind: VertexKind
    multiplicity: int = 1
    boundary: bool = False


@dataclass(frozen=True)
class ReebEdge:
    src: int  # node id, lower value
    dst: int  # node id, higher value
    instance: int = 0


@dataclass(frozen=True)
class ReebGraph:
    nodes: tuple
    edges: tuple

    def node_degree(self, node):
        up = sum(1 for e in self.edges if e.src == node)
        down = sum(1 for e in self.edges if e.dst == node)
        return up, down

    def groups(self):
        """Edges grouped by endpoint pair: ``{(src, dst): [edge index, ...]}``."""
        out = {}
        for i, e in enumerate(self.edges):
            out.setdefault((e.src, e.dst), []).append(i)
        return out

    def n_components(self):
        n = len(self.nodes)
        if n == 0:
            return 0
        src = [e.src for e in self.edges]
        dst = [e.dst for e in self.edges]
        g = sparse.coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
        return connected_components(g, directed=False)[0]

    def to_dict(self):
        return {
            "schema": 1,
            "nodes": [
                {
                    "id": i,
                    "vertex": int(c.vertex),
                    "position": [float(x) for x in c.position],
                    "value": float(c.value),
                    "kind": c.kind.value,
                    "multiplicity": int(c.multiplicity),
                }
                for i, c in enumerate(self.nodes)
            ],
            "edges": [{"src": e.src, "dst": e.dst, "instance": e.instance} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data):
        nodes = tuple(
            CriticalPoint(n["vertex"], tuple(n["position"]), n["value"], VertexKind(n["kind"]),
                          n.get("multiplicity", 1))
            for n in data["nodes"]
        )
        edges = tuple(ReebEdge(e["src"], e["dst"], e.get("instance", 0)) for e in data["edges"])
        return cls(nodes, edges)


def loops(graph):
    """Independent cycle count: ``|E| - |N| + components``."""
    return len(graph.edges) - len(graph.nodes) + graph.n_components()


def _ordered_link(mesh, v):
    """Link of ``v`` as lists of vertex walks (closed cycles or open paths)."""
    tris = np.flatnonzero((mesh.triangles == v).any(axis=1))
    nbr = {}
    for t in mesh.triangles[tris]:
        a, b = (int(x) for x in t if x != v)
        nbr.setdefault(a, []).append(b)
        nbr.setdefault(b, []).append(a)
    walks, seen = [], set()
    # open paths start at link vertices of degree 1
    starts = sorted(k for k, n in nbr.items() if len(n) == 1) + sorted(nbr)
    for s in starts:
        if s in seen:
            continue
        walk, prev, cur = [s], None, s
        seen.add(s)
        while True:
            nxt = [x for x in nbr[cur] if x != prev and x not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
            seen.add(cur)
        closed = len(nbr[s]) == 2 and s in nbr[walk[-1]] and len(walk) > 2
        walks.append((walk, closed))
    return walks


def _runs(flags, closed):
    """Number of maximal True runs and False runs in ``flags``."""
    if not flags:
        return 0, 0
    changes = sum(flags[i] != flags[i - 1] for i in range(1, len(flags)))
    if closed:
        changes += flags[0] != flags[-1]
        if changes == 0:
            return (1, 0) if flags[0] else (0, 1)
        return changes // 2, changes // 2
    n_true = sum(1 for i, f in enumerate(flags) if f and (i == 0 or not flags[i - 1]))
    n_false = sum(1 for i, f in enumerate(flags) if not f and (i == 0 or flags[i - 1]))
    return n_true, n_false


def classify_vertex(mesh, field, v):
    """Classify vertex ``v`` from the lower/upper runs around its link.

    Returns ``(kind, multiplicity, boundary)``; ``boundary`` is True when the
    link is open and runs were counted without wrapping around.
    """
    walks = _ordered_link(mesh, v)
    if not walks:
        raise ValueError(f"vertex {v} has an empty link")
    lower_runs = upper_runs = 0
    boundary = False
    for walk, closed in walks:
        flags = [bool(field.rank[u] < field.rank[v]) for u in walk]
        lo, up = _runs(flags, closed)
        lower_runs += lo
        upper_runs += up
        boundary |= not closed
    if lower_runs == 0:
        return VertexKind.MINIMUM, 1, boundary
    if upper_runs == 0:
        return VertexKind.MAXIMUM, 1, boundary
    if lower_runs == 1 and upper_runs == 1:
        return VertexKind.REGULAR, 0, boundary
    return VertexKind.SADDLE, max(lower_runs, upper_runs) - 1, boundary


def classify_vertices(mesh, field):
    """Vectorized classification of every vertex.

    Returns ``(kinds, multiplicity, boundary)`` arrays; ``kinds`` holds
    :class:`VertexKind` objects.
    """
    rank = field.rank
    t = mesh.triangles
    n = mesh.n_vertices
    changes = np.zeros(n, dtype=np.int64)
    for k in range(3):
        a, b, c = t[:, k], t[:, (k + 1) % 3], t[:, (k + 2) % 3]
        flip = (rank[b] < rank[a]) != (rank[c] < rank[a])
        np.add.at(changes, a, flip.astype(np.int64))
    e = mesh.edges
    lo_end = np.where(rank[e[:, 0]] < rank[e[:, 1]], e[:, 0], e[:, 1])
    hi_end = np.where(rank[e[:, 0]] < rank[e[:, 1]], e[:, 1], e[:, 0])
    n_lower = np.bincount(hi_end, minlength=n)
    n_upper = np.bincount(lo_end, minlength=n)

    kinds = np.full(n, VertexKind.REGULAR, dtype=object)
    mult = np.zeros(n, dtype=np.int64)
    kinds[n_lower == 0] = VertexKind.MINIMUM
    kinds[n_upper == 0] = VertexKind.MAXIMUM
    mult[(n_lower == 0) | (n_upper == 0)] = 1
    saddle = (n_lower > 0) & (n_upper > 0) & (changes > 2)
    kinds[saddle] = VertexKind.SADDLE
    mult[saddle] = changes[saddle] // 2 - 1
    boundary = mesh.boundary_vertices.copy()
    for v in np.flatnonzero(boundary):
        kinds[v], mult[v], _ = classify_vertex(mesh, field, int(v))
    # isolated vertices have no link
    used = np.zeros(n, dtype=bool)
    used[t.ravel()] = True
    kinds[~used] = VertexKind.REGULAR
    mult[~used] = 0
    return kinds, mult, boundary


def critical_points(mesh, field):
    """Critical vertices sorted by the field's total order."""
    kinds, mult, boundary = classify_vertices(mesh, field)
    crit = np.flatnonzero(kinds != VertexKind.REGULAR)
    crit = crit[np.argsort(field.rank[crit])]
    return [
        CriticalPoint(int(v), tuple(float(x) for x in mesh.vertices[v]), float(field.values[v]),
                      kinds[v], int(mult[v]), bool(boundary[v]))
        for v in crit
    ]


def _level_components(mesh, below):
    """Connected components of the level set between ``below`` and the rest.

    Returns an array over edges: component label for crossing edges, -1
    elsewhere.
    """
    e = mesh.edges
    crossing = below[e[:, 0]] != below[e[:, 1]]
    labels = np.full(mesh.n_edges, -1, dtype=np.int64)
    idx = np.flatnonzero(crossing)
    if idx.size == 0:
        return labels
    te = mesh.triangle_edges
    tc = crossing[te]
    mixed = tc.sum(axis=1) == 2
    pairs = te[mixed][tc[mixed]].reshape(-1, 2)
    g = sparse.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                          shape=(mesh.n_edges, mesh.n_edges))
    _, lab = connected_components(g, directed=False)
    # relabel compactly over crossing edges, ordered by first crossing edge
    _, compact = np.unique(lab[idx], return_inverse=True)
    labels[idx] = compact.reshape(-1)
    return labels


def _slab_regions(mesh, state):
    """Connected regions of the slab ``state == 1`` (0 below, 2 above).

    Elements are inside vertices, edges crossing the lower level and edges
    crossing the upper level. Returns labels over ``V + 2E`` element ids.
    """
    V, E = mesh.n_vertices, mesh.n_edges
    t, te, e = mesh.triangles, mesh.triangle_edges, mesh.edges
    st = state[t]
    overlap = ~(np.all(st == 0, axis=1) | np.all(st == 2, axis=1))
    s0, s1 = state[e[:, 0]], state[e[:, 1]]
    lower_cross = (s0 == 0) != (s1 == 0)
    upper_cross = (s0 == 2) != (s1 == 2)
    tt, tte, tst = t[overlap], te[overlap], st[overlap]
    elems = np.concatenate([
        np.where(tst == 1, tt, -1),
        np.where(lower_cross[tte], V + tte, -1),
        np.where(upper_cross[tte], V + E + tte, -1),
    ], axis=1)
    present = elems >= 0
    first = elems[np.arange(len(elems)), np.argmax(present, axis=1)]
    rows = np.broadcast_to(first[:, None], elems.shape)[present]
    cols = elems[present]
    n = V + 2 * E
    g = sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return labels, lower_cross, upper_cross


def compute_reeb_graph(mesh, field):
    """Reeb graph of a (tie-free) vertex function on a triangle mesh."""
    if not mesh.is_closed:
        logger.warning("mesh has boundary; Reeb graph is computed best-effort")
    if len(field) != mesh.n_vertices:
        raise ValueError("field size does not match mesh")
    crit = critical_points(mesh, field)
    m = len(crit)
    if m == 0:
        return ReebGraph((), ())
    rank = field.rank
    crit_rank = np.array([rank[c.vertex] for c in crit])
    # level i sits between crit i and crit i+1
    thresholds = (crit_rank[:-1] + crit_rank[1:]) // 2
    level_labels = [_level_components(mesh, rank <= k) for k in thresholds]

    V, E = mesh.n_vertices, mesh.n_edges
    # comp_up[i][c]: what contour component c of level i leads to going up
    comp_up = [dict() for _ in range(m - 1)]
    # node_up[s]: upper contour components leaving critical node s
    node_up = [[] for _ in range(m)]
    for s in range(m):
        lo = thresholds[s - 1] if s > 0 else -1
        hi = thresholds[s] if s < m - 1 else np.iinfo(np.int64).max
        state = np.where(rank <= lo, 0, np.where(rank > hi, 2, 1))
        labels, lower_cross, upper_cross = _slab_regions(mesh, state)
        lower_of, upper_of = {}, {}
        if s > 0:
            for eid in np.flatnonzero(lower_cross):
                lower_of.setdefault(labels[V + eid], set()).add(int(level_labels[s - 1][eid]))
        if s < m - 1:
            for eid in np.flatnonzero(upper_cross):
                upper_of.setdefault(labels[V + E + eid], set()).add(int(level_labels[s][eid]))
        crit_region = labels[crit[s].vertex]
        for region in set(lower_of) | set(upper_of) | {crit_region}:
            lows = sorted(lower_of.get(region, ()))
            ups = sorted(upper_of.get(region, ()))
            if region == crit_region:
                node_up[s] = ups
                for c in lows:
                    comp_up[s - 1][c] = ("node", s)
                continue
            if len(lows) != 1 or len(ups) != 1:
                if not mesh.is_closed and (len(lows) == 0 or len(ups) == 0):
                    continue
                members = np.flatnonzero(labels[:V] == region)
                vals = field.values[members] if members.size else np.array([np.nan])
                raise TopologyError(
                    f"slab {s} region without critical vertex has {len(lows)} lower and "
                    f"{len(ups)} upper contours (values {np.nanmin(vals):.6g}..{np.nanmax(vals):.6g})"
                )
            comp_up[s - 1][lows[0]] = ("comp", ups[0])

    edges, counts = [], {}
    for s in range(m):
        for c in node_up[s]:
            level, comp = s, c
            while True:
                nxt = comp_up[level].get(comp)
                if nxt is None:
                    raise TopologyError(f"contour component {comp} at level {level} leads nowhere")
                if nxt[0] == "node":
                    dst = nxt[1]
                    break
                level, comp = level + 1, nxt[1]
            inst = counts.get((s, dst), 0)
            counts[(s, dst)] = inst + 1
            edges.append(ReebEdge(s, dst, inst))
    edges.sort(key=lambda e: (e.src, e.dst, e.instance))
    return ReebGraph(tuple(crit), tuple(edges))
