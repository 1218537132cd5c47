"""Per-vertex scalar functions with a strict total order."""

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .exceptions import FieldError

AXES = {"x": 0, "y": 1, "z": 2}

# direction -> (axis, sign): the source is the vertex extreme along sign*axis
DIRECTIONS = {
    "top": (2, 1.0),
    "bottom": (2, -1.0),
    "right": (0, 1.0),
    "left": (0, -1.0),
    "back": (1, 1.0),
    "front": (1, -1.0),
}


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "height" or "geodesic"
    axis: str = None
    direction: str = None

    @classmethod
    def parse(cls, text):
        """Parse ``x|y|z|geo:<direction>``."""
        text = text.strip().lower()
        if text in AXES:
            return cls("height", axis=text)
        if text.startswith("geo:") and text[4:] in DIRECTIONS:
            return cls("geodesic", direction=text[4:])
        raise FieldError(
            f"bad field spec {text!r}; expected x, y, z or geo:{{{','.join(DIRECTIONS)}}}"
        )

    def __str__(self):
        return self.axis if self.kind == "height" else f"geo:{self.direction}"

    @property
    def principal_axis(self):
        return AXES[self.axis] if self.kind == "height" else None


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Vertex values plus the (value, index) total order.

    ``rank[v]`` is the position of vertex ``v`` in that order, so
    ``rank[u] < rank[v]`` is the strict comparison used everywhere.
    """

    values: np.ndarray
    spec: FieldSpec = None
    rank: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise FieldError("field values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise FieldError("field values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        order = np.lexsort((np.arange(len(vals)), vals))
        rank = np.empty(len(vals), dtype=np.int64)
        rank[order] = np.arange(len(vals))
        rank.setflags(write=False)
        object.__setattr__(self, "rank", rank)

    @property
    def order(self):
        return np.argsort(self.rank)

    def __len__(self):
        return len(self.values)

    def lower(self, u, v):
        """True when ``u`` precedes ``v`` in the total order."""
        return self.rank[u] < self.rank[v]

    @property
    def span(self):
        return float(self.values.max() - self.values.min())

    def scaled(self, factor):
        if factor <= 0:
            raise FieldError("scale factor must be positive")
        return ScalarField(self.values * factor, self.spec)


def height_field(mesh, axis):
    """Coordinate of every vertex along ``axis`` (``"x"``, ``"y"`` or ``"z"``)."""
    if axis not in AXES:
        raise FieldError(f"unknown axis {axis!r}")
    return ScalarField(mesh.vertices[:, AXES[axis]], FieldSpec("height", axis=axis))


def extreme_vertex(mesh, direction):
    """Vertex extreme along the signed axis of ``direction``; ties -> lowest index."""
    axis, sign = DIRECTIONS[direction]
    coord = sign * mesh.vertices[:, axis]
    return int(np.flatnonzero(coord == coord.max())[0])


def geodesic_field(mesh, direction):
    """Edge-graph shortest-path distance from the extreme vertex of ``direction``."""
    if direction not in DIRECTIONS:
        raise FieldError(f"unknown direction {direction!r}")
    src = extreme_vertex(mesh, direction)
    dist = dijkstra(mesh.adjacency, directed=False, indices=src)
    unreached = ~np.isfinite(dist)
    if unreached.any():
        _, labels = mesh.connected_components()
        sizes = sorted(np.bincount(labels[unreached]).tolist(), reverse=True)
        sizes = [s for s in sizes if s]
        raise FieldError(f"mesh is disconnected; unreached component sizes: {sizes}")
    return ScalarField(dist, FieldSpec("geodesic", direction=direction))


def make_field(mesh, spec):
    if isinstance(spec, str):
        spec = FieldSpec.parse(spec)
    if spec.kind == "height":
        return height_field(mesh, spec.axis)
    return geodesic_field(mesh, spec.direction)


def perturb_distinct(field):
    """Make all values numerically distinct without changing the total order.

    Each run of ``k`` equal values gets offsets ``0, d, ..., (k-1) d`` by
    index, with ``d = 1e-12 * range``. ``d`` shrinks for a run that would
    otherwise reach the next distinct value.
    """
    vals = field.values
    if len(vals) < 2:
        return field
    order = field.order
    s = vals[order]
    same = np.r_[False, s[1:] == s[:-1]]
    if not same.any():
        return field
    span = float(s[-1] - s[0])
    base_delta = 1e-12 * span if span > 0 else 1e-12
    out = s.copy()
    starts = np.flatnonzero(~same)
    ends = np.r_[starts[1:], len(s)]
    for a, b in zip(starts, ends):
        k = b - a
        if k == 1:
            continue
        delta = base_delta
        if b < len(s):
            gap = s[b] - s[a]
            delta = min(delta, gap / k)
        delta = max(delta, np.spacing(abs(s[a])) * 2)
        out[a:b] = s[a] + delta * np.arange(k)
    # guarantee strict increase if a gap was below float resolution
    if np.any(np.diff(out) <= 0):
        for i in range(1, len(out)):
            if out[i] <= out[i - 1]:
                out[i] = np.nextafter(out[i - 1], np.inf)
    new = np.empty_like(out)
    new[order] = out
    return ScalarField(new, field.spec)
