"""Nearest-surface distance and inside/outside queries on a triangle mesh."""

import enum

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import MeshError

_CHUNK = 1 << 22  # max point*triangle pairs evaluated at once


class PointClass(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    ON_SURFACE = "on_surface"
    OFF_SURFACE = "off_surface"  # open mesh: inside/outside is undefined


def closest_points_on_triangles(p, a, b, c):
    """Closest point on triangle ``(a, b, c)`` to ``p``, row-wise.

    All inputs have shape (n, 3); uses the Voronoi-region case split, so the
    result is exact up to floating point for degenerate and obtuse triangles.
    """
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    out = np.empty_like(p)
    done = np.zeros(len(p), dtype=bool)

    def take(mask, value):
        m = mask & ~done
        out[m] = value[m] if value.ndim == 2 else value
        done[:] |= m

    take((d1 <= 0) & (d2 <= 0), a)
    take((d3 >= 0) & (d4 <= d3), b)
    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = d1 / (d1 - d3)
        take((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + v_ab[:, None] * ab)
        take((d6 >= 0) & (d5 <= d6), c)
        w_ac = d2 / (d2 - d6)
        take((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + w_ac[:, None] * ac)
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        take((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0), b + w_bc[:, None] * (c - b))
        denom = va + vb + vc
        v = vb / denom
        w = vc / denom
        take(np.ones(len(p), dtype=bool), a + v[:, None] * ab + w[:, None] * ac)
    return out


def point_triangle_distance(p, a, b, c):
    q = closest_points_on_triangles(p, a, b, c)
    return np.linalg.norm(p - q, axis=1)


class SpatialIndex:
    """Spatial queries against a fixed :class:`~gaspreeb.mesh.TriangleMesh`.

    Nearest-triangle queries use a k-d tree over triangle centroids: the
    best of the ``k`` nearest centroids gives an upper bound ``d``, and every
    triangle that could beat it has its centroid within ``d + r_max``, where
    ``r_max`` is the largest centroid-to-corner radius. The returned
    distance is therefore the exact minimum over all triangles.
    """

    def __init__(self, mesh, k=8):
        self.mesh = mesh
        p = mesh.vertices[mesh.triangles]
        self._a, self._b, self._c = (np.ascontiguousarray(p[:, i]) for i in range(3))
        self._centroids = p.mean(axis=1)
        self._radius = float(np.max(np.linalg.norm(p - self._centroids[:, None], axis=2)))
        self._tree = cKDTree(self._centroids)
        self._k = min(k, mesh.n_triangles)
        self.default_tolerance = 1e-6 * mesh.diagonal

    def distance(self, points):
        """Unsigned distance from each point to the nearest triangle."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        _, nn = self._tree.query(pts, k=self._k)
        nn = nn.reshape(len(pts), -1)
        rep = np.repeat(pts, nn.shape[1], axis=0)
        ids = nn.ravel()
        upper = point_triangle_distance(rep, self._a[ids], self._b[ids], self._c[ids])
        upper = upper.reshape(len(pts), -1).min(axis=1)
        cand = self._tree.query_ball_point(pts, upper + self._radius + 1e-12)
        counts = np.fromiter((len(c) for c in cand), dtype=np.int64, count=len(pts))
        ids = np.fromiter((i for c in cand for i in c), dtype=np.int64, count=int(counts.sum()))
        owner = np.repeat(np.arange(len(pts)), counts)
        d = point_triangle_distance(pts[owner], self._a[ids], self._b[ids], self._c[ids])
        out = upper.copy()
        np.minimum.at(out, owner, d)
        return out

    def winding_number(self, points):
        """Generalized winding number of the surface around each point."""
        m = self.mesh
        if not m.is_closed:
            raise MeshError("winding number needs a closed mesh")
        if not m.is_consistently_oriented:
            raise MeshError("closed mesh is inconsistently oriented; winding queries refused")
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        out = np.empty(len(pts))
        step = max(1, _CHUNK // max(1, m.n_triangles))
        for s in range(0, len(pts), step):
            q = pts[s:s + step, None, :]
            a, b, c = self._a[None] - q, self._b[None] - q, self._c[None] - q
            la, lb, lc = (np.linalg.norm(x, axis=2) for x in (a, b, c))
            det = np.einsum("ijk,ijk->ij", a, np.cross(b, c))
            den = (la * lb * lc
                   + np.einsum("ijk,ijk->ij", a, b) * lc
                   + np.einsum("ijk,ijk->ij", b, c) * la
                   + np.einsum("ijk,ijk->ij", c, a) * lb)
            out[s:s + step] = np.arctan2(det, den).sum(axis=1) / (2.0 * np.pi)
        return out

    def classify(self, points, tolerance=None):
        """Vectorized :func:`classify_point` returning an array of labels."""
        tol = self.default_tolerance if tolerance is None else tolerance
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        d = self.distance(pts)
        labels = np.empty(len(pts), dtype=object)
        on = d <= tol
        labels[on] = PointClass.ON_SURFACE
        if not self.mesh.is_closed:
            labels[~on] = PointClass.OFF_SURFACE
            return labels
        rest = np.flatnonzero(~on)
        if rest.size:
            w = np.abs(self.winding_number(pts[rest]))
            labels[rest] = np.where(w > 0.5, PointClass.INSIDE, PointClass.OUTSIDE)
        return labels


def distance_to_surface(index, p):
    return float(index.distance(np.asarray(p, dtype=np.float64)[None])[0])


def classify_point(index, p, tolerance=None):
    """Classify ``p`` as inside, outside or on the surface of the indexed mesh.

    A point within ``tolerance`` of the surface is ``ON_SURFACE``; otherwise
    it is ``INSIDE`` when the absolute generalized winding number exceeds
    one half. Open meshes only distinguish on/off surface.
    """
    return index.classify(np.asarray(p, dtype=np.float64)[None], tolerance)[0]
