"""Embedded arcs and the embedded Reeb graph they form."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import TopologyError

REGULAR_BOUNDARY = "regular-boundary"
REGULAR_INTERIOR = "regular-interior"
THIN = "thin"
BARYCENTER = "barycenter"


@dataclass(frozen=True, eq=False)
class EmbeddedArc:
    """Polyline for one Reeb edge, running from its lower to its upper node.

    ``isovalues[i]`` is the function value the embedding assigned to
    ``points[i]``; ``lengths`` holds the arc length after each pass of the
    embedding (coarse pass first) where that is meaningful.
    """

    edge: int
    src: int
    dst: int
    instance: int
    points: np.ndarray
    isovalues: np.ndarray
    kind: str
    lengths: tuple = ()
    info: dict = field(default_factory=dict)

    @property
    def length(self):
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def to_dict(self):
        return {
            "edge": int(self.edge),
            "src": int(self.src),
            "dst": int(self.dst),
            "instance": int(self.instance),
            "kind": self.kind,
            "points": [[float(x) for x in p] for p in self.points],
            "isovalues": [float(v) for v in self.isovalues],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["edge"], d["src"], d["dst"], d["instance"],
                   np.asarray(d["points"], dtype=np.float64).reshape(-1, 3),
                   np.asarray(d["isovalues"], dtype=np.float64), d["kind"])


@dataclass(frozen=True, eq=False)
class EmbeddedReebGraph:
    reeb: object
    arcs: tuple
    method: str
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.arcs)

    def to_dict(self):
        return {
            "schema": 1,
            "method": self.method,
            "params": dict(sorted(self.params.items())),
            "arcs": [a.to_dict() for a in self.arcs],
        }


def assemble(reeb, arcs, method, params=None):
    """Order arcs by edge, check the edge bijection and snap the endpoints."""
    by_edge = {}
    for a in arcs:
        if a.edge in by_edge:
            raise TopologyError(f"duplicate arc for Reeb edge {a.edge}")
        by_edge[a.edge] = a
    missing = [i for i in range(len(reeb.edges)) if i not in by_edge]
    if missing:
        raise TopologyError(f"missing arcs for Reeb edges {missing}")
    if len(by_edge) != len(reeb.edges):
        raise TopologyError("arcs reference unknown Reeb edges")
    out = []
    for i, e in enumerate(reeb.edges):
        a = by_edge[i]
        pts = np.array(a.points, dtype=np.float64)
        pts[0] = reeb.nodes[e.src].position
        pts[-1] = reeb.nodes[e.dst].position
        out.append(EmbeddedArc(i, e.src, e.dst, e.instance, pts, np.asarray(a.isovalues, float),
                               a.kind, a.lengths, a.info))
    return EmbeddedReebGraph(reeb, tuple(out), method, dict(params or {}))
