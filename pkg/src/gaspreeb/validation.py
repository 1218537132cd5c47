"""Input coercion and checks shared by the public entry points."""

import numpy as np

from .exceptions import FieldError, MeshError
from .field import FieldSpec, ScalarField, make_field
from .mesh import TriangleMesh


def check_mesh(mesh):
    """Return a :class:`TriangleMesh` from a mesh or a ``(vertices, triangles)`` pair."""
    if isinstance(mesh, TriangleMesh):
        return mesh
    if isinstance(mesh, (tuple, list)) and len(mesh) == 2:
        return TriangleMesh(np.asarray(mesh[0]), np.asarray(mesh[1]))
    raise MeshError(f"expected a TriangleMesh or (vertices, triangles), got {type(mesh).__name__}")


def check_field(mesh, field):
    """Return a :class:`ScalarField` on ``mesh``.

    ``field`` may be a spec string (``"z"``, ``"geo:top"``), a
    :class:`FieldSpec`, a :class:`ScalarField` or an array of vertex values.
    """
    if isinstance(field, (str, FieldSpec)):
        return make_field(mesh, field)
    if not isinstance(field, ScalarField):
        field = ScalarField(np.asarray(field, dtype=np.float64))
    if len(field) != mesh.n_vertices:
        raise FieldError(f"field has {len(field)} values for {mesh.n_vertices} vertices")
    return field


def check_positive(name, value, strict=True):
    if value is None or not np.isfinite(value) or (value <= 0 if strict else value < 0):
        bound = "positive" if strict else "non-negative"
        raise ValueError(f"{name} must be {bound}, got {value!r}")
    return value
