"""Reeb graph computation and gradient-aware arc embedding on triangle meshes."""

__version__ = "0.1.0"

from .arcs import EmbeddedArc, EmbeddedReebGraph, assemble
from .decomposition import Decomposer, TopologicalCylinder, cut_triangle, extract_cylinder
from .estimators import GaspEmbedding, GeometricBarycenterEmbedding
from .exceptions import FieldError, GaspError, MeshError, ThinFeatureError, TopologyError
from .field import ScalarField, make_field, perturb_distinct
from .gasp import GaspParams, contour_count, gasp_embed
from .gb import GbParams, gb_embed
from .generators import generate
from .mesh import TriangleMesh, load_mesh, save_obj
from .metrics import evaluate
from .pipeline import run
from .reeb import ReebGraph, compute_reeb_graph, loops
from .spatial import PointClass, SpatialIndex

__all__ = [
    "Decomposer", "EmbeddedArc", "EmbeddedReebGraph", "FieldError", "GaspEmbedding",
    "GaspError", "GaspParams", "GbParams", "GeometricBarycenterEmbedding", "MeshError",
    "PointClass", "ReebGraph", "ScalarField", "SpatialIndex", "ThinFeatureError",
    "TopologicalCylinder", "TopologyError", "TriangleMesh", "assemble", "compute_reeb_graph",
    "contour_count", "cut_triangle", "evaluate", "extract_cylinder", "gasp_embed", "gb_embed",
    "generate", "load_mesh", "loops", "make_field", "perturb_distinct", "run", "save_obj",
]
