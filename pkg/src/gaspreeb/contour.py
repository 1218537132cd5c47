"""Isocontour extraction on a cylinder by marching triangles."""

from dataclasses import dataclass

import numpy as np

from .exceptions import TopologyError


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed polyline at one isovalue; ``points[-1]`` connects to ``points[0]``.

    ``edges[i]`` is the cylinder mesh edge that ``points[i]`` lies on.
    """

    isovalue: float
    points: np.ndarray
    edges: np.ndarray
    cylinder: int = -1

    def __len__(self):
        return len(self.points)

    @property
    def segment_lengths(self):
        return np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)

    @property
    def arc_positions(self):
        """Arc length from ``points[0]`` to each point."""
        return np.r_[0.0, np.cumsum(self.segment_lengths)[:-1]]

    @property
    def length(self):
        return float(self.segment_lengths.sum())

    def point_at(self, s):
        """Points at arc lengths ``s`` (taken modulo the loop length)."""
        seg = self.segment_lengths
        start = np.r_[0.0, np.cumsum(seg)[:-1]]
        s = np.mod(np.asarray(s, dtype=np.float64), seg.sum())
        i = np.clip(np.searchsorted(start, s, side="right") - 1, 0, len(seg) - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(seg[i] > 0, (s - start[i]) / seg[i], 0.0)
        nxt = self.points[(i + 1) % len(seg)]
        return self.points[i] + t[:, None] * (nxt - self.points[i])


def contour_segments(mesh, values, isovalue):
    """Crossing points and per-triangle segments of the level set.

    A vertex counts as below when ``value <= isovalue``. Returns
    ``(points over crossing edges, crossing edge ids, segment pairs)``
    where each segment pair holds two crossing edge ids.
    """
    e = mesh.edges
    below = values <= isovalue
    crossing = below[e[:, 0]] != below[e[:, 1]]
    ids = np.flatnonzero(crossing)
    a, b = e[ids, 0], e[ids, 1]
    t = (isovalue - values[a]) / (values[b] - values[a])
    pts = mesh.vertices[a] + t[:, None] * (mesh.vertices[b] - mesh.vertices[a])
    te = mesh.triangle_edges
    tc = crossing[te]
    mixed = tc.sum(axis=1) == 2
    pairs = te[mixed][tc[mixed]].reshape(-1, 2)
    return pts, ids, pairs


def marching_contour(cylinder, isovalue):
    """The single closed loop of ``cylinder`` at ``isovalue``.

    Raises :class:`TopologyError` when the level set is empty, open or
    has more than one loop.
    """
    if not cylinder.lower < isovalue < cylinder.upper:
        raise ValueError(f"isovalue {isovalue} outside cylinder range ({cylinder.lower}, {cylinder.upper})")
    return trace_loop(cylinder.mesh, cylinder.values, isovalue, cylinder.edge)


def trace_loop(mesh, values, isovalue, tag=-1):
    pts, ids, pairs = contour_segments(mesh, values, isovalue)
    if len(ids) == 0:
        raise TopologyError(f"edge {tag}: empty contour at {isovalue:.6g}")
    pos = np.full(mesh.n_edges, -1, dtype=np.int64)
    pos[ids] = np.arange(len(ids))
    local = pos[pairs]
    deg = np.bincount(local.ravel(), minlength=len(ids))
    if np.any(deg != 2):
        raise TopologyError(f"edge {tag}: open contour at {isovalue:.6g}")
    nbr = np.full((len(ids), 2), -1, dtype=np.int64)
    fill = np.zeros(len(ids), dtype=np.int64)
    for x, y in local.tolist():
        nbr[x, fill[x]] = y
        fill[x] += 1
        nbr[y, fill[y]] = x
        fill[y] += 1
    order = [0]
    prev, cur = -1, 0
    while True:
        a, b = nbr[cur]
        nxt = a if a != prev else b
        if nxt == 0:
            break
        order.append(int(nxt))
        prev, cur = cur, nxt
        if len(order) > len(ids):
            raise TopologyError(f"edge {tag}: malformed contour at {isovalue:.6g}")
    if len(order) != len(ids):
        raise TopologyError(
            f"edge {tag}: {isovalue:.6g} level set has more than one loop "
            f"({len(order)} of {len(ids)} crossings in the first)"
        )
    order = np.asarray(order)
    return Contour(float(isovalue), pts[order], ids[order], tag)
