"""Exception types raised across the pipeline."""


class GaspError(Exception):
    """Base class for all library errors."""


class MeshError(GaspError, ValueError):
    """Invalid mesh input (parse failure, non-manifold edge, bad orientation)."""


class FieldError(GaspError, ValueError):
    """Scalar field cannot be built on the given mesh."""


class TopologyError(GaspError, RuntimeError):
    """A topological invariant was violated (Reeb/cut disagreement, broken contour)."""


class ThinFeatureError(GaspError, ValueError):
    """Function span of an edge is smaller than the contour spacing."""

    def __init__(self, span, spacing):
        super().__init__(f"function span {span:.6g} is below contour spacing {spacing:.6g}")
        self.span = span
        self.spacing = spacing
