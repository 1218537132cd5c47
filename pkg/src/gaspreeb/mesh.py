"""Triangle mesh container, OBJ/PLY input, normalization and adjacency."""

import logging
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .exceptions import MeshError

logger = logging.getLogger(__name__)

WELD_EPS = 1e-9


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class TriangleMesh:
    """Indexed triangle mesh with edge adjacency.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Vertex positions.
    triangles : array_like, shape (m, 3)
        Vertex indices per triangle, counter-clockwise seen from outside.

    Notes
    -----
    Arrays are frozen after construction, so a mesh can be shared between
    threads. Construction raises :class:`MeshError` when an edge has more
    than two incident triangles.
    """

    def __init__(self, vertices, triangles):
        v = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle references a vertex index out of range")
        if t.size and np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            raise MeshError("triangle with repeated vertex index")
        self.vertices = _readonly(v)
        self.triangles = _readonly(t)
        self._build_edges()

    def _build_edges(self):
        t = self.triangles
        half = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1).reshape(-1, 2)
        key = np.sort(half, axis=1)
        edges, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
        bad = np.flatnonzero(counts > 2)
        if bad.size:
            a, b = edges[bad[0]]
            raise MeshError(
                f"non-manifold edge ({a}, {b}) shared by {counts[bad[0]]} triangles"
            )
        tri_of_half = np.repeat(np.arange(len(t)), 3)
        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        order = np.argsort(inverse, kind="stable")
        first = np.ones(len(order), dtype=bool)
        first[1:] = inverse[order][1:] != inverse[order][:-1]
        edge_tris[inverse[order][first], 0] = tri_of_half[order][first]
        edge_tris[inverse[order][~first], 1] = tri_of_half[order][~first]
        self.edges = _readonly(edges.reshape(-1, 2).astype(np.int64))
        self.edge_triangles = _readonly(edge_tris)
        # triangle i, corner k -> edge id of (t[i,k], t[i,k+1])
        self.triangle_edges = _readonly(inverse.reshape(-1, 3))
        self._half_edges = half

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_map(self):
        """Return ``{(a, b): [triangle ids]}`` keyed by sorted vertex pairs."""
        out = {}
        for (a, b), (t0, t1) in zip(self.edges.tolist(), self.edge_triangles.tolist()):
            out[(a, b)] = [t0] if t1 < 0 else [t0, t1]
        return out

    @cached_property
    def boundary_edges(self):
        return self.edges[self.edge_triangles[:, 1] < 0]

    @property
    def is_closed(self):
        return len(self.boundary_edges) == 0

    @cached_property
    def boundary_vertices(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_edges.ravel()] = True
        return mask

    @property
    def euler_characteristic(self):
        used = np.unique(self.triangles)
        return len(used) - self.n_edges + self.n_triangles

    @cached_property
    def is_consistently_oriented(self):
        # every interior edge must be traversed once in each direction
        h = self._half_edges
        fwd = h[:, 0] < h[:, 1]
        key = np.sort(h, axis=1)
        _, inv = np.unique(key, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        n_fwd = np.bincount(inv, weights=fwd, minlength=self.n_edges)
        n_all = np.bincount(inv, minlength=self.n_edges)
        interior = n_all == 2
        return bool(np.all(n_fwd[interior] == 1))

    @cached_property
    def triangle_areas(self):
        p = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    @cached_property
    def adjacency(self):
        """Symmetric vertex adjacency as a CSR matrix weighted by edge length."""
        a, b = self.edges[:, 0], self.edges[:, 1]
        w = np.linalg.norm(self.vertices[a] - self.vertices[b], axis=1)
        n = self.n_vertices
        m = sparse.coo_matrix((np.r_[w, w], (np.r_[a, b], np.r_[b, a])), shape=(n, n))
        return m.tocsr()

    def vertex_neighbors(self, v):
        adj = self.adjacency
        return adj.indices[adj.indptr[v]:adj.indptr[v + 1]]

    def connected_components(self):
        """Label vertices by edge-connected component."""
        return connected_components(self.adjacency, directed=False)

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def diagonal(self):
        lo, hi = self.bounds
        return float(np.linalg.norm(hi - lo))

    def __repr__(self):
        return f"TriangleMesh(n_vertices={self.n_vertices}, n_triangles={self.n_triangles})"


def weld_and_clean(vertices, triangles, eps=WELD_EPS):
    """Weld vertices closer than ``eps`` and drop degenerate triangles.

    Unreferenced vertices are removed; returns the new arrays.
    """
    v = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if len(v) == 0:
        raise MeshError("mesh has no vertices")
    pairs = cKDTree(v).query_pairs(eps, output_type="ndarray")
    if len(pairs):
        g = sparse.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(v), len(v)))
        _, labels = connected_components(g, directed=False)
        # representative = lowest original index in each cluster
        rep = np.full(labels.max() + 1, len(v), dtype=np.int64)
        np.minimum.at(rep, labels, np.arange(len(v)))
        t = rep[labels][t]
    keep = (t[:, 0] != t[:, 1]) & (t[:, 1] != t[:, 2]) & (t[:, 0] != t[:, 2])
    p = v[t]
    area2 = np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    keep &= area2 > 0.0
    dropped = int(len(t) - keep.sum())
    if dropped:
        logger.info("dropped %d degenerate triangles", dropped)
    t = t[keep]
    used = np.unique(t)
    remap = np.full(len(v), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return v[used], remap[t]


def _fan(poly):
    return [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]


def _parse_obj(text):
    verts, faces = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    i = int(tok.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                if len(idx) < 3:
                    raise ValueError("face with fewer than 3 vertices")
                faces.extend(_fan(idx))
        except ValueError as exc:
            raise MeshError(f"OBJ parse error on line {lineno}: {exc}") from None
    return verts, faces


def _parse_ply(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshError("PLY parse error: missing 'ply' magic")
    elements, i = [], 1
    while i < len(lines):
        parts = lines[i].split()
        i += 1
        if not parts:
            continue
        if parts[0] == "format" and parts[1] != "ascii":
            raise MeshError("only ASCII PLY is supported")
        elif parts[0] == "element":
            elements.append([parts[1], int(parts[2]), []])
        elif parts[0] == "property":
            elements[-1][2].append(parts[-1] if parts[1] != "list" else ("list", parts[-1]))
        elif parts[0] == "end_header":
            break
    verts, faces = [], []
    try:
        for name, count, props in elements:
            rows = lines[i:i + count]
            i += count
            if len(rows) < count:
                raise ValueError(f"expected {count} {name} rows")
            if name == "vertex":
                ix = [props.index(c) for c in ("x", "y", "z")]
                for row in rows:
                    vals = row.split()
                    verts.append([float(vals[k]) for k in ix])
            elif name == "face":
                for row in rows:
                    vals = [int(x) for x in row.split()]
                    n = vals[0]
                    faces.extend(_fan(vals[1:1 + n]))
    except (ValueError, IndexError) as exc:
        raise MeshError(f"PLY parse error: {exc}") from None
    return verts, faces


def load_mesh(path):
    """Load an ASCII OBJ or PLY file into a validated :class:`TriangleMesh`.

    Polygons are fan-triangulated, vertices within 1e-9 are welded and
    zero-area triangles are dropped.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except UnicodeDecodeError:
        raise MeshError(f"{path}: not an ASCII file") from None
    suffix = path.suffix.lower()
    if suffix == ".obj":
        verts, faces = _parse_obj(text)
    elif suffix == ".ply":
        verts, faces = _parse_ply(text)
    else:
        raise MeshError(f"unsupported mesh format: {suffix!r}")
    if not faces:
        raise MeshError(f"{path}: no faces")
    faces = np.asarray(faces, dtype=np.int64)
    if faces.min() < 0 or faces.max() >= len(verts):
        raise MeshError(f"{path}: face index out of range")
    v, t = weld_and_clean(verts, faces)
    return TriangleMesh(v, t)


def save_obj(mesh, path, lines=None):
    """Write a mesh (and optional polylines as ``l`` records) to OBJ."""
    with open(path, "w") as fh:
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for a, b, c in mesh.triangles + 1:
            fh.write(f"f {a} {b} {c}\n")
        base = mesh.n_vertices
        for line in lines or ():
            for x, y, z in np.asarray(line, dtype=np.float64).tolist():
                fh.write(f"v {x!r} {y!r} {z!r}\n")
            idx = " ".join(str(base + k + 1) for k in range(len(line)))
            fh.write(f"l {idx}\n")
            base += len(line)


def normalize(mesh):
    """Uniformly scale and center so the largest extent spans exactly [-1, 1]."""
    if mesh.n_vertices == 0:
        raise MeshError("cannot normalize an empty mesh")
    lo, hi = mesh.bounds
    ext = hi - lo
    axis = int(np.argmax(ext))
    if ext[axis] <= 0.0:
        raise MeshError("cannot normalize a zero-extent mesh")
    center = 0.5 * (lo + hi)
    v = (mesh.vertices - center) * (2.0 / ext[axis])
    v[:, axis] = np.clip(v[:, axis], -1.0, 1.0)
    v[np.argmin(mesh.vertices[:, axis]), axis] = -1.0
    v[np.argmax(mesh.vertices[:, axis]), axis] = 1.0
    return TriangleMesh(v, mesh.triangles)
