"""Quality measures for embedded arcs and per-graph reports.

All functions take plain ``(n, 3)`` point arrays so they apply equally to
arcs from any embedding method.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .spatial import PointClass

DEFAULT_TOLERANCE = 1e-3
MAX_TURN = math.pi / 2 - 1e-6
# turning angles below this are rounding noise of collinear points
ANGLE_FLOOR = 1e-12
METRIC_NAMES = ("outside_ratio", "outside_area", "length_ratio", "gradient_deviation",
                "smoothness_M", "smoothness_alpha")


def _as_points(points):
    p = np.asarray(points, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 3 or len(p) < 2:
        raise ValueError("an arc needs at least two 3D points")
    return p


def subdivide_polyline(points, max_length):
    """Split every segment into equal pieces no longer than ``max_length``.

    Returns ``(samples, piece_lengths)``; consecutive samples bound one
    piece, and the input vertices are among the samples.
    """
    p = _as_points(points)
    seg = np.diff(p, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    counts = np.maximum(1, np.ceil(lens / max_length).astype(np.int64))
    owner = np.repeat(np.arange(len(seg)), counts)
    k = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    t = (k / counts[owner])[:, None]
    samples = np.vstack([p[owner] + t * seg[owner], p[-1:]])
    return samples, (lens / counts)[owner]


def _outside_pieces(points, index, tolerance):
    if not index.mesh.is_closed:
        raise ValueError("outside measures need a closed mesh")
    samples, pieces = subdivide_polyline(points, 10.0 * tolerance)
    labels = index.classify(samples, tolerance)
    out = labels == PointClass.OUTSIDE
    return samples, pieces, out[:-1] & out[1:]


def outside_ratio(points, index, tolerance=DEFAULT_TOLERANCE):
    """Fraction of arc length lying outside the closed mesh.

    The arc is cut into pieces of at most ``10 * tolerance``; a piece is
    outside when both its ends are (points within ``tolerance`` of the
    surface count as inside).
    """
    _, pieces, outside = _outside_pieces(points, index, tolerance)
    total = pieces.sum()
    return float(pieces[outside].sum() / total) if total > 0 else 0.0


def outside_area(points, index, tolerance=DEFAULT_TOLERANCE):
    """Trapezoid sum ``l * (d1 + d2) / 2`` over the outside pieces."""
    samples, pieces, outside = _outside_pieces(points, index, tolerance)
    if not outside.any():
        return 0.0
    idx = np.flatnonzero(outside)
    d = index.distance(samples)
    return float(np.sum(pieces[idx] * (d[idx] + d[idx + 1]) / 2.0))


def length_ratio(points):
    """Arc length over end-to-end distance; None for coincident ends."""
    p = _as_points(points)
    chord = np.linalg.norm(p[-1] - p[0])
    if chord == 0:
        return None
    return float(np.linalg.norm(np.diff(p, axis=0), axis=1).sum() / chord)


def gradient_deviation(points, axis):
    """Travel along the two other axes over travel along ``axis``.

    Returns ``inf`` when the arc never moves along ``axis``.
    """
    p = _as_points(points)
    travel = np.abs(np.diff(p, axis=0)).sum(axis=0)
    principal = travel[axis]
    other = travel.sum() - principal
    if principal == 0:
        return math.inf
    return float(other / principal)


def turning_angles(points):
    """Angle between consecutive non-degenerate segments, in ``[0, pi]``."""
    p = _as_points(points)
    d = np.diff(p, axis=0)
    n = np.linalg.norm(d, axis=1)
    d = d[n > 0] / n[n > 0, None]
    if len(d) < 2:
        return np.zeros(0)
    sin = np.linalg.norm(np.cross(d[:-1], d[1:]), axis=1)
    cos = np.einsum("ij,ij->i", d[:-1], d[1:])
    theta = np.arctan2(sin, cos)
    theta[theta < ANGLE_FLOOR] = 0.0
    return theta


def smoothness(points):
    """``(M, alpha)``: mean tangent of the clamped turning angles and ``1/(1+M)``."""
    theta = turning_angles(points)
    if len(theta) == 0:
        return 0.0, 1.0
    m = float(np.mean(np.tan(np.clip(theta, 0.0, MAX_TURN))))
    return m, 1.0 / (1.0 + m)


@dataclass
class ArcMetrics:
    edge: int
    kind: str
    outside_ratio: float = None
    outside_area: float = None
    length_ratio: float = None
    gradient_deviation: float = None
    smoothness_M: float = None
    smoothness_alpha: float = None


def arc_metrics(arc, index=None, axis=None, tolerance=DEFAULT_TOLERANCE):
    """All measures of one arc; closed-mesh and height-field ones when available."""
    p = arc.points
    m, alpha = smoothness(p)
    out = ArcMetrics(int(arc.edge), arc.kind, length_ratio=length_ratio(p),
                     smoothness_M=m, smoothness_alpha=alpha)
    if index is not None and index.mesh.is_closed:
        out.outside_ratio = outside_ratio(p, index, tolerance)
        out.outside_area = outside_area(p, index, tolerance)
    if axis is not None:
        out.gradient_deviation = gradient_deviation(p, axis)
    return out


def _mean(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return float(sum(vals) / len(vals))


def _json_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


@dataclass
class MetricsReport:
    arcs: list
    metadata: dict = field(default_factory=dict)

    @property
    def means(self):
        return {name: _mean([getattr(a, name) for a in self.arcs]) for name in METRIC_NAMES}

    def to_dict(self):
        return {
            "schema": 1,
            "metadata": self.metadata,
            "means": {k: _json_value(v) for k, v in self.means.items()},
            "arcs": [{k: _json_value(v) for k, v in asdict(a).items()} for a in self.arcs],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["edge", "kind", *METRIC_NAMES]
        w.writerow(cols)
        for a in self.arcs:
            w.writerow(["" if getattr(a, c) is None else getattr(a, c) for c in cols])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data):
        def val(v):
            return math.inf if v == "inf" else v
        arcs = [ArcMetrics(**{k: val(v) for k, v in a.items()}) for a in data["arcs"]]
        return cls(arcs, data.get("metadata", {}))


def evaluate(embedded, index=None, axis=None, tolerance=DEFAULT_TOLERANCE, metadata=None):
    """Per-arc metrics for an :class:`~gaspreeb.arcs.EmbeddedReebGraph`."""
    arcs = [arc_metrics(a, index, axis, tolerance) for a in embedded.arcs]
    meta = {"method": embedded.method, "params": embedded.params, "tolerance": tolerance}
    meta.update(metadata or {})
    return MetricsReport(arcs, meta)
