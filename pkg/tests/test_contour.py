import numpy as np
import pytest

from conftest import grid_strip, open_tube, shape_setup
from gaspreeb.contour import Contour, contour_segments, marching_contour, trace_loop
from gaspreeb.exceptions import TopologyError
from gaspreeb.mesh import TriangleMesh


def open_cone(n_around=24, n_rings=10):
    """Open cone r = 1 - z for z in [0, 0.9], apex removed."""
    phi = 2 * np.pi * np.arange(n_around) / n_around
    z = np.linspace(0, 0.9, n_rings)
    v = np.array([[(1 - h) * np.cos(p), (1 - h) * np.sin(p), h] for h in z for p in phi])
    t = []
    for k in range(n_rings - 1):
        for j in range(n_around):
            j1 = (j + 1) % n_around
            a, b = k * n_around + j, k * n_around + j1
            c, d = a + n_around, b + n_around
            t += [(a, b, d), (a, d, c)]
    return TriangleMesh(v, np.array(t))


@pytest.mark.parametrize("h", [0.05, 0.33, 0.61, 0.87])
def test_cone_contour_radius(h):
    mesh = open_cone()
    c = trace_loop(mesh, mesh.vertices[:, 2], h)
    r = np.hypot(c.points[:, 0], c.points[:, 1])
    assert np.allclose(c.points[:, 2], h)
    assert r.max() <= (1 - h) + 1e-12
    assert r.min() >= (1 - h) * np.cos(np.pi / 24) - 1e-12
    assert c.length == pytest.approx(2 * np.pi * (1 - h), rel=0.01)


def test_points_match_crossed_triangles():
    mesh = open_tube()
    f = mesh.vertices[:, 2]
    for h in (0.1, 0.77, 1.5):
        c = trace_loop(mesh, f, h)
        fv = f[mesh.triangles]
        crossed = np.count_nonzero((fv.min(axis=1) <= h) & (fv.max(axis=1) > h))
        assert len(c) == crossed
        # consecutive points share a triangle: they lie on edges of one face
        te = mesh.triangle_edges
        for a, b in zip(c.edges, np.roll(c.edges, -1)):
            assert ((te == a).any(axis=1) & (te == b).any(axis=1)).any()


def test_vertex_on_level_counts_below():
    mesh = open_tube(n_rings=5, height=2.0)
    c = trace_loop(mesh, mesh.vertices[:, 2], 1.0)
    # the ring at z = 1 is below, so every crossing sits on the next ring up
    assert np.allclose(c.points[:, 2], 1.0)
    pts, ids, pairs = contour_segments(mesh, mesh.vertices[:, 2], 1.0)
    assert len(pts) == len(ids) and pairs.shape[1] == 2


def test_contour_geometry_helpers():
    sq = np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])
    c = Contour(0.0, sq, np.arange(4))
    assert c.length == 4.0
    assert np.array_equal(c.arc_positions, [0, 1, 2, 3])
    assert np.allclose(c.point_at([0.5, 4.5, 3.75]), [[0.5, 0, 0], [0.5, 0, 0], [0, 0.25, 0]])


def test_failure_modes():
    mesh = open_tube()
    f = mesh.vertices[:, 2]
    with pytest.raises(TopologyError, match="empty"):
        trace_loop(mesh, f, 5.0)
    strip = grid_strip()
    with pytest.raises(TopologyError, match="open"):
        trace_loop(strip, strip.vertices[:, 0], 0.45)
    two = TriangleMesh(np.vstack([mesh.vertices, mesh.vertices + [5, 0, 0]]),
                       np.vstack([mesh.triangles, mesh.triangles + mesh.n_vertices]))
    with pytest.raises(TopologyError, match="more than one loop"):
        trace_loop(two, two.vertices[:, 2], 0.7)


def test_marching_contour_on_cylinder():
    _, _, reeb, dec, _ = shape_setup("torus")
    cyl = dec.extract_all()[0]
    mid = 0.5 * (cyl.lower + cyl.upper)
    c = marching_contour(cyl, mid)
    assert c.cylinder == cyl.edge and len(c) >= 3
    with pytest.raises(ValueError):
        marching_contour(cyl, cyl.upper)
