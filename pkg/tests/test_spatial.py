import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaspreeb.exceptions import MeshError
from gaspreeb.generators import generate, sphere
from gaspreeb.mesh import TriangleMesh
from gaspreeb.spatial import (PointClass, SpatialIndex, classify_point, closest_points_on_triangles,
                              distance_to_surface)

from conftest import grid_strip


@pytest.fixture(scope="module")
def ball():
    return SpatialIndex(sphere(32))


@pytest.fixture(scope="module")
def ring():
    return SpatialIndex(generate("torus", "24x12"))


def ray_parity(mesh, p, direction=(0.5773, 0.5774, 0.5775)):
    """Inside iff a ray from ``p`` crosses the surface an odd number of times."""
    d = np.asarray(direction) / np.linalg.norm(direction)
    a, b, c = (mesh.vertices[mesh.triangles[:, i]] for i in range(3))
    e1, e2 = b - a, c - a
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) > 1e-14
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    s = p - a
    u = inv * np.einsum("ij,ij->i", s, h)
    q = np.cross(s, e1)
    v = inv * (q @ d)
    t = inv * np.einsum("ij,ij->i", e2, q)
    hit = ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 0)
    return hit.sum() % 2 == 1


def brute_distance(mesh, p, n=60):
    """Minimum over a dense barycentric sample of every triangle (an upper bound)."""
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = i + j <= n
    w = np.stack([i[keep], j[keep]], axis=1) / n
    tri = mesh.vertices[mesh.triangles]
    pts = tri[:, :1] + w[None, :, :1] * (tri[:, 1:2] - tri[:, :1]) + w[None, :, 1:] * (tri[:, 2:] - tri[:, :1])
    return np.linalg.norm(pts - p, axis=2).min()


def test_sphere_examples(ball):
    assert classify_point(ball, [0, 0, 0]) is PointClass.INSIDE
    assert classify_point(ball, [2, 0, 0]) is PointClass.OUTSIDE
    v = ball.mesh.vertices[7]
    assert classify_point(ball, v, 1e-6) is PointClass.ON_SURFACE
    assert distance_to_surface(ball, v) == 0.0
    c = ball.mesh.vertices[ball.mesh.triangles[5]].mean(axis=0)
    assert distance_to_surface(ball, c) == pytest.approx(0.0, abs=1e-15)


def test_distance_to_sphere_within_faceting(ball):
    # faceting error of the inscribed polyhedron is below 1 - cos(pi / 16)
    d = distance_to_surface(ball, [0, 0, 2])
    assert abs(d - 1.0) <= 1 - np.cos(np.pi / 16)


def test_distance_matches_dense_sampling(ring):
    rng = np.random.default_rng(3)
    h = 1.0 / 60 * ring.mesh.diagonal
    for p in rng.uniform(-1.3, 1.3, size=(5, 3)):
        exact = ring.distance(p[None])[0]
        sampled = brute_distance(ring.mesh, p)
        assert exact <= sampled + 1e-12
        assert sampled - exact <= h


def test_distance_bounded_by_vertices(ring):
    rng = np.random.default_rng(4)
    pts = rng.uniform(-2, 2, size=(200, 3))
    d = ring.distance(pts)
    vd = np.linalg.norm(pts[:, None] - ring.mesh.vertices[None], axis=2).min(axis=1)
    assert np.all(d <= vd + 1e-12)


@pytest.mark.parametrize("shape", ["sphere", "torus", "genus2"])
def test_classify_agrees_with_ray_parity(shape):
    mesh = generate(shape, 24 if shape != "genus2" else 28)
    index = SpatialIndex(mesh)
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1.1, 1.1, size=(1000, 3))
    labels = index.classify(pts)
    for p, lab in zip(pts, labels):
        if lab is PointClass.ON_SURFACE:
            continue
        assert (lab is PointClass.INSIDE) == ray_parity(mesh, p)


def test_open_mesh_off_surface():
    index = SpatialIndex(grid_strip())
    labels = index.classify(np.array([[0.5, 0.1, 0.0], [0.5, 0.1, 1.0]]))
    assert list(labels) == [PointClass.ON_SURFACE, PointClass.OFF_SURFACE]
    with pytest.raises(MeshError):
        index.winding_number(np.zeros((1, 3)))


def test_inconsistent_orientation_refused():
    m = sphere(12)
    t = m.triangles.copy()
    t[0] = t[0, ::-1]
    bad = SpatialIndex(TriangleMesh(m.vertices, t))
    with pytest.raises(MeshError, match="oriented"):
        bad.classify(np.array([[0.0, 0.0, 0.0]]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=12, max_size=12))
def test_closest_point_is_on_triangle_and_optimal(xs):
    p, a, b, c = (np.array(xs[i:i + 3])[None] for i in range(0, 12, 3))
    q = closest_points_on_triangles(p, a, b, c)[0]
    # any barycentric sample is no closer
    w = np.random.default_rng(0).dirichlet([1, 1, 1], size=300)
    samples = w[:, :1] * a + w[:, 1:2] * b + w[:, 2:] * c
    assert np.linalg.norm(q - p[0]) <= np.linalg.norm(samples - p[0], axis=1).min() + 1e-9
