import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import grid_strip, shape_mesh, shape_setup
from gaspreeb.field import ScalarField, make_field, perturb_distinct
from gaspreeb.reeb import (ReebGraph, VertexKind, classify_vertex, classify_vertices,
                           compute_reeb_graph, critical_points, loops)


def kinds_of(graph):
    return sorted(n.kind.value for n in graph.nodes)


def test_sphere_graph():
    _, _, g, _, _ = shape_setup("sphere")
    assert (len(g.nodes), len(g.edges), loops(g)) == (2, 1, 0)
    assert kinds_of(g) == ["maximum", "minimum"]


def test_torus_graph_and_duplicity():
    _, _, g, _, _ = shape_setup("torus")
    assert (len(g.nodes), len(g.edges), loops(g)) == (4, 4, 1)
    assert kinds_of(g) == ["maximum", "minimum", "saddle", "saddle"]
    dup = {k: len(v) for k, v in g.groups().items()}
    assert sorted(dup.values()) == [1, 1, 2]
    (pair,) = [k for k, v in dup.items() if v == 2]
    assert [g.nodes[i].kind for i in pair] == [VertexKind.SADDLE, VertexKind.SADDLE]
    assert g.node_degree(pair[0]) == (2, 1) and g.node_degree(pair[1]) == (1, 2)


def test_genus2_loops():
    _, _, g, _, _ = shape_setup("genus2")
    assert loops(g) == 2 and g.n_components() == 1


def test_modified_torus_has_extra_branch():
    _, _, g, _, _ = shape_setup("modified-torus")
    assert loops(g) == 1 and len(g.nodes) == 6


def test_nodes_ordered_and_edges_increasing():
    for shape in ("torus", "genus2"):
        _, field, g, _, _ = shape_setup(shape)
        vals = [n.value for n in g.nodes]
        assert vals == sorted(vals)
        assert all(g.nodes[e.src].value < g.nodes[e.dst].value for e in g.edges)
        # each vertex of the Morse function: min/max degree 1, simple saddle degree 3
        for i, n in enumerate(g.nodes):
            deg = sum(g.node_degree(i))
            if n.kind is VertexKind.SADDLE:
                assert deg == 2 + n.multiplicity
            else:
                assert deg == 1


@settings(max_examples=15, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_torus_one_loop_any_direction(a, b, c):
    d = np.array([a, b, c])
    if np.linalg.norm(d) < 1e-3:
        d = np.array([0.0, 0.0, 1.0])
    mesh = shape_mesh("torus", "24x12")
    g = compute_reeb_graph(mesh, perturb_distinct(ScalarField(mesh.vertices @ d)))
    assert loops(g) == 1
    assert len(g.edges) == len(g.nodes)


def test_vectorized_matches_per_vertex():
    mesh = shape_mesh("genus2", 40)
    rng = np.random.default_rng(7)
    field = ScalarField(rng.permutation(mesh.n_vertices).astype(float))
    kinds, mult, _ = classify_vertices(mesh, field)
    for v in range(mesh.n_vertices):
        k, m, _ = classify_vertex(mesh, field, v)
        assert (k, m) == (kinds[v], mult[v])


def test_morse_count_identity():
    # minima - saddles (with multiplicity) + maxima = Euler characteristic
    for shape in ("sphere", "torus", "genus2", "cone"):
        mesh, field, _, _, _ = shape_setup(shape)
        cp = critical_points(mesh, field)
        total = sum(-c.multiplicity if c.kind is VertexKind.SADDLE else 1 for c in cp)
        assert total == mesh.euler_characteristic


def test_affine_rescaling_invariant():
    mesh, field, g, _, _ = shape_setup("torus")
    g2 = compute_reeb_graph(mesh, ScalarField(3.0 * field.values + 1.0))
    assert [n.vertex for n in g2.nodes] == [n.vertex for n in g.nodes]
    assert g2.edges == g.edges


def test_dict_roundtrip():
    _, _, g, _, _ = shape_setup("torus")
    back = ReebGraph.from_dict(g.to_dict())
    assert back.edges == g.edges
    assert [(n.vertex, n.kind, n.value) for n in back.nodes] == \
        [(n.vertex, n.kind, n.value) for n in g.nodes]


def test_inner_equator_saddles():
    mesh, _, g, _, _ = shape_setup("torus")
    saddles = [n for n in g.nodes if n.kind is VertexKind.SADDLE]
    # the torus hole axis is y: saddles sit on the inner rim, close to the axis
    r = [np.hypot(n.position[0], n.position[2]) for n in saddles]
    rim = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 2])
    assert max(r) < np.median(rim)


def test_planar_regular_and_boundary_flags():
    mesh = grid_strip(6, 5)
    field = perturb_distinct(ScalarField(mesh.vertices[:, 0] + 0.01 * mesh.vertices[:, 1]))
    kind, mult, boundary = classify_vertex(mesh, field, 2 * 5 + 2)
    assert (kind, mult, boundary) == (VertexKind.REGULAR, 0, False)
    kinds, _, bflags = classify_vertices(mesh, field)
    assert bflags[0] and not bflags[12]
    assert kinds[0] is VertexKind.MINIMUM


def test_monkey_saddle_multiplicity():
    # center of a hexagon fan with alternating up/down neighbors
    ang = np.arange(6) * np.pi / 3
    v = np.vstack([[0, 0, 0], np.c_[np.cos(ang), np.sin(ang), np.zeros(6)]])
    t = np.array([(0, 1 + i, 1 + (i + 1) % 6) for i in range(6)])
    from gaspreeb.mesh import TriangleMesh
    mesh = TriangleMesh(v, t)
    field = ScalarField(np.array([0.0, 1, -1, 2, -2, 3, -3]))
    assert classify_vertex(mesh, field, 0) == (VertexKind.SADDLE, 2, False)


def test_empty_field_size_mismatch():
    mesh = shape_mesh("sphere", 8)
    with pytest.raises(ValueError):
        compute_reeb_graph(mesh, ScalarField(np.zeros(3)))
