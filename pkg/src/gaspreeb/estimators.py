"""Estimator-style wrappers around the embedding pipeline."""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .decomposition import DEFAULT_BINS
from .metrics import DEFAULT_TOLERANCE, evaluate
from .pipeline import make_params, run
from .spatial import SpatialIndex
from .validation import check_mesh


class _ReebEmbedding(BaseEstimator):
    _method = None

    def _params(self):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Compute the Reeb graph of ``X`` and embed its arcs.

        Parameters
        ----------
        X : TriangleMesh or (vertices, triangles)
            Input surface.
        y : array-like of shape (n_vertices,), optional
            Vertex values to use instead of ``self.field``.

        Returns
        -------
        self : object
        """
        mesh = check_mesh(X)
        result = run(mesh, self.field if y is None else y, self._method, self._params(),
                     self.threads, self.bins)
        self.mesh_ = mesh
        self.field_ = result.field
        self.reeb_ = result.reeb
        self.embedding_ = result.embedded
        self.timings_ = result.timings
        self.n_arcs_ = len(result.embedded.arcs)
        return self

    def transform(self, X=None):
        """Arc polylines of the fitted embedding, one ``(n, 3)`` array per Reeb edge."""
        check_is_fitted(self, "embedding_")
        return [a.points for a in self.embedding_.arcs]

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform()

    def score(self, X=None, y=None, tolerance=DEFAULT_TOLERANCE):
        """Mean fraction of arc length that stays inside or on the mesh."""
        check_is_fitted(self, "embedding_")
        report = self.report(tolerance)
        ratio = report.means["outside_ratio"]
        return None if ratio is None else 1.0 - ratio

    def report(self, tolerance=DEFAULT_TOLERANCE):
        """Per-arc :class:`~gaspreeb.metrics.MetricsReport` of the fitted arcs."""
        check_is_fitted(self, "embedding_")
        index = SpatialIndex(self.mesh_) if self.mesh_.is_closed else None
        spec = self.field_.spec
        axis = spec.principal_axis if spec is not None else None
        return evaluate(self.embedding_, index, axis, tolerance)


class GaspEmbedding(_ReebEmbedding):
    """Gradient-aware shortest path embedding.

    Parameters
    ----------
    field : str, default="z"
        Field spec (``x``, ``y``, ``z`` or ``geo:<direction>``).
    mode : {"boundary", "interior"}, default="boundary"
    spacing : float, default=0.05
    buffer : float, default=0.05
    budget : int, default=40
    refinements : int, default=2
    thin_iterations : int, default=5
    bins : int, default=20
    threads : int, default=1
    """

    def __init__(self, field="z", mode="boundary", spacing=0.05, buffer=0.05, budget=40,
                 refinements=2, thin_iterations=5, bins=DEFAULT_BINS, threads=1):
        self.field = field
        self.mode = mode
        self.spacing = spacing
        self.buffer = buffer
        self.budget = budget
        self.refinements = refinements
        self.thin_iterations = thin_iterations
        self.bins = bins
        self.threads = threads

    @property
    def _method(self):
        return f"gasp-{self.mode}"

    def _params(self):
        return make_params(self._method, spacing=self.spacing, buffer=self.buffer,
                           budget=self.budget, refinements=self.refinements,
                           thin_iterations=self.thin_iterations)


class GeometricBarycenterEmbedding(_ReebEmbedding):
    """Contour-barycenter embedding with Laplacian smoothing.

    Parameters
    ----------
    field : str, default="z"
    sampling : int, default=15
        Segments per arc.
    smoothing : int, default=15
        Smoothing rounds.
    bins : int, default=20
    threads : int, default=1
    """

    _method = "gb"

    def __init__(self, field="z", sampling=15, smoothing=15, bins=DEFAULT_BINS, threads=1):
        self.field = field
        self.sampling = sampling
        self.smoothing = smoothing
        self.bins = bins
        self.threads = threads

    def _params(self):
        return make_params("gb", sampling=self.sampling, smoothing=self.smoothing)
