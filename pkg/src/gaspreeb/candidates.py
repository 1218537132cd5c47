"""Candidate path points per contour: on the loop or inside it."""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

BOUNDARY = "boundary"
INTERIOR = "interior"
CENTROID = "centroid"


@dataclass(frozen=True, eq=False)
class Candidates:
    """Points offered to the path graph for one contour.

    ``mode`` records how they were produced (``boundary``, ``interior`` or
    ``centroid`` for the single-point fallback); ``cell`` is the interior
    grid spacing and ``plane`` the projection frame, both kept so later
    refinement passes can zoom in consistently.
    """

    points: np.ndarray
    mode: str
    cell: float = 0.0
    plane: tuple = None


# boundary -------------------------------------------------------------------


def uniform_indices(arc, length, count):
    """Indices of loop vertices nearest ``count`` uniform arc-length targets."""
    n = len(arc)
    targets = length * np.arange(count) / count
    i = np.searchsorted(arc, targets)
    d_hi = np.where(i < n, arc[np.minimum(i, n - 1)], length) - targets
    d_lo = np.where(i > 0, targets - arc[np.maximum(i - 1, 0)], targets + length - arc[-1])
    pick = np.where(d_hi <= d_lo, i % n, (i - 1) % n)
    return np.unique(pick)


def boundary_candidates(contour, budget, window=None):
    """Points on the contour loop.

    Without ``window``, up to ``budget`` loop vertices spread uniformly by
    arc length. With ``window = (center, width)``, ``center`` being a point
    of the loop, returns up to ``budget`` points evenly spaced along the
    loop over an arc of length ``width`` centered there (the center itself
    included).
    """
    pts = contour.points
    if window is None:
        if len(pts) <= budget:
            return Candidates(pts.copy(), BOUNDARY)
        idx = uniform_indices(contour.arc_positions, contour.length, budget)
        return Candidates(pts[idx], BOUNDARY)
    center, width = window
    length = contour.length
    s0 = locate_on_loop(contour, center)
    if width >= length:
        width = length * (1.0 - 1.0 / budget)
    half = max(1, (budget - 1) // 2)
    offsets = 0.5 * width * np.arange(-half, half + 1) / half
    out = contour.point_at(s0 + offsets)
    out[half] = center  # keep the previous point bit-exact
    return Candidates(out, BOUNDARY)


def locate_on_loop(contour, point):
    """Arc length of the loop point nearest to ``point``."""
    p = contour.points
    q = np.roll(p, -1, axis=0)
    d = q - p
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.where(dd > 0, np.einsum("ij,ij->i", point - p, d) / dd, 0.0), 0.0, 1.0)
    dist = np.linalg.norm(p + t[:, None] * d - point, axis=1)
    i = int(np.argmin(dist))
    return float(contour.arc_positions[i] + t[i] * np.sqrt(dd[i]))


# interior -------------------------------------------------------------------


def fit_plane(points):
    """Centroid and orthonormal frame ``(e1, e2, normal)`` by PCA.

    Returns None when the points are (nearly) collinear.
    """
    c = points.mean(axis=0)
    _, s, vt = np.linalg.svd(points - c, full_matrices=False)
    if len(s) < 2 or s[1] <= 1e-9 * max(s[0], 1e-300):
        return None
    return c, vt[0], vt[1], np.cross(vt[0], vt[1])


def project(points, plane):
    c, e1, e2, _ = plane
    d = points - c
    return np.stack([d @ e1, d @ e2], axis=1)


def lift(uv, plane):
    c, e1, e2, _ = plane
    return c + uv[:, :1] * e1 + uv[:, 1:2] * e2


def points_in_polygon(points, polygon):
    """Even-odd rule; ``polygon`` is an (m, 2) closed ring without repeat."""
    x, y = points[:, 0:1], points[:, 1:2]
    ax, ay = polygon[:, 0], polygon[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    straddle = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = ax + (y - ay) * (bx - ax) / (by - ay)
    return (np.count_nonzero(straddle & (x < xi), axis=1) % 2) == 1


def polygon_distance(points, polygon):
    """Distance from each 2D point to the closed polygon boundary."""
    a = polygon
    b = np.roll(polygon, -1, axis=0)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    out = np.full(len(points), np.inf)
    step = max(1, (1 << 20) // max(1, len(a)))
    for s in range(0, len(points), step):
        p = points[s:s + step, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(dd > 0, np.einsum("ijk,jk->ij", p - a, d) / dd, 0.0)
        t = np.clip(t, 0.0, 1.0)
        q = a + t[..., None] * d
        out[s:s + step] = np.sqrt(np.min(np.sum((p - q) ** 2, axis=2), axis=1))
    return out


def polygon_area_centroid(polygon):
    x, y = polygon[:, 0], polygon[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    if abs(area) < 1e-300:
        return polygon.mean(axis=0), 0.0
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return np.array([cx, cy]), abs(area)


def _admissible(uv, polygon, buffer):
    keep = points_in_polygon(uv, polygon)
    if buffer > 0 and keep.any():
        idx = np.flatnonzero(keep)
        keep[idx] = polygon_distance(uv[idx], polygon) >= buffer
    return keep


def _grid(lo, hi, cell):
    xs = np.arange(lo[0] + cell / 2, hi[0], cell)
    ys = np.arange(lo[1] + cell / 2, hi[1], cell)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def interior_candidates(contour, buffer, budget, window=None):
    """Grid points inside the planar projection of the contour.

    The loop is projected onto its least-squares plane; grid points that
    fall inside the polygon and at least ``buffer`` from its boundary are
    lifted back to 3D. The grid is sized so that at most ``budget`` points
    survive.

    With ``window = (previous Candidates, previous point, loop width)``, a
    grid of half the cell size (four times the density) is laid over the
    3x3 previous cells around the previous point, and the ``budget``
    admissible points nearest to it are kept, the previous point among
    them. Contours that fell back to loop points refine along the loop
    with ``loop width`` as in :func:`boundary_candidates`.

    When nothing survives, falls back to the polygon centroid if it lies
    inside, otherwise to :func:`boundary_candidates`. Collinear contours
    also use loop points.
    """
    if window is not None:
        prev, center, width = window
        if prev.mode == CENTROID:
            return prev
        if prev.mode == BOUNDARY:
            return boundary_candidates(contour, budget, (center, width))
        return _refine_interior(contour, buffer, budget, prev, center)
    plane = fit_plane(contour.points)
    if plane is None:
        logger.info("contour at %.6g is degenerate; using loop points", contour.isovalue)
        return boundary_candidates(contour, budget)
    poly = project(contour.points, plane)
    centroid, area = polygon_area_centroid(poly)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    cell = np.sqrt(max(area, 1e-300) / budget) / 2.0
    for _ in range(200):
        uv = _grid(lo, hi, cell)
        keep = _admissible(uv, poly, buffer)
        if np.count_nonzero(keep) <= budget:
            break
        cell *= 1.1
    uv = uv[keep]
    if len(uv):
        return Candidates(lift(uv, plane), INTERIOR, cell, plane)
    if points_in_polygon(centroid[None], poly)[0]:
        logger.info("buffer %.3g leaves no interior point at %.6g; using centroid", buffer, contour.isovalue)
        return Candidates(lift(centroid[None], plane), CENTROID, cell, plane)
    logger.info("buffer %.3g leaves no interior point at %.6g; using loop points", buffer, contour.isovalue)
    return boundary_candidates(contour, budget)


def _refine_interior(contour, buffer, budget, prev, center):
    plane = prev.plane
    poly = project(contour.points, plane)
    c2 = project(np.asarray(center)[None], plane)[0]
    cell = prev.cell / 2.0
    k = np.arange(-3, 4) * cell
    gx, gy = np.meshgrid(k, k, indexing="ij")
    uv = c2 + np.stack([gx.ravel(), gy.ravel()], axis=1)
    keep = _admissible(uv, poly, buffer)
    keep[24] = True  # the previous point itself (grid center)
    uv = uv[keep]
    d = np.linalg.norm(uv - c2, axis=1)
    order = np.lexsort((np.arange(len(uv)), d))[:budget]
    uv = uv[np.sort(order)]
    pts = lift(uv, plane)
    pts[np.argmin(np.linalg.norm(uv - c2, axis=1))] = center
    return Candidates(pts, INTERIOR, cell, plane)
