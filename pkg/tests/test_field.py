import heapq

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaspreeb.exceptions import FieldError
from gaspreeb.field import (FieldSpec, ScalarField, extreme_vertex, geodesic_field, height_field,
                            make_field, perturb_distinct)
from gaspreeb.generators import cone, sphere, torus
from gaspreeb.mesh import TriangleMesh


def heap_dijkstra(mesh, src):
    nbrs = [[] for _ in range(mesh.n_vertices)]
    for a, b in mesh.edges:
        w = float(np.linalg.norm(mesh.vertices[a] - mesh.vertices[b]))
        nbrs[a].append((b, w))
        nbrs[b].append((a, w))
    dist = [np.inf] * mesh.n_vertices
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in nbrs[u]:
            if d + w < dist[v]:
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    return np.array(dist)


def chain_strip(n=8):
    """Strip of triangles whose bottom row is a straight chain along x."""
    v = [[i, 0, 0] for i in range(n)] + [[i + 0.5, 1, 0] for i in range(n - 1)]
    t = []
    for i in range(n - 1):
        t.append((i, i + 1, n + i))
        if i < n - 2:
            t.append((i + 1, n + i + 1, n + i))
    return TriangleMesh(np.array(v, float), np.array(t))


def test_spec_parsing():
    assert FieldSpec.parse("Z") == FieldSpec("height", axis="z")
    assert str(FieldSpec.parse("geo:left")) == "geo:left"
    for bad in ("w", "geo:up", ""):
        with pytest.raises(FieldError):
            FieldSpec.parse(bad)


def test_height_field_examples():
    s = sphere(16)
    f = height_field(s, "z")
    assert np.array_equal(f.values, s.vertices[:, 2])
    assert f.spec.principal_axis == 2
    assert np.array_equal(height_field(s, "x").values, s.vertices[:, 0])


def test_geodesic_chain_is_cumulative():
    m = chain_strip()
    # leftmost vertex is vertex 0
    f = geodesic_field(m, "left")
    assert f.values[0] == 0.0
    assert np.allclose(f.values[:8], np.arange(8))
    assert np.allclose(f.values, heap_dijkstra(m, 0))


def test_geodesic_relaxation_and_oracle():
    m = torus(24, 12)
    f = geodesic_field(m, "top")
    src = extreme_vertex(m, "top")
    assert f.values[src] == 0.0 and f.values.min() == 0.0
    assert np.allclose(f.values, heap_dijkstra(m, src))
    e = m.edges
    lens = np.linalg.norm(m.vertices[e[:, 0]] - m.vertices[e[:, 1]], axis=1)
    assert np.all(np.abs(f.values[e[:, 0]] - f.values[e[:, 1]]) <= lens + 1e-12)


def test_geodesic_symmetric_on_chain():
    m = chain_strip()
    a, b = 0, 7
    assert heap_dijkstra(m, a)[b] == pytest.approx(geodesic_field(m, "left").values[b])
    assert heap_dijkstra(m, b)[a] == pytest.approx(heap_dijkstra(m, a)[b])


def test_geodesic_disconnected_lists_components():
    a, b = sphere(8), cone(8, 4)
    v = np.vstack([a.vertices, b.vertices + 5])
    t = np.vstack([a.triangles, b.triangles + a.n_vertices])
    with pytest.raises(FieldError, match=str(b.n_vertices)):
        geodesic_field(TriangleMesh(v, t), "left")


def test_make_field_dispatch():
    m = sphere(8)
    assert make_field(m, "geo:top").spec.kind == "geodesic"
    assert make_field(m, FieldSpec("height", axis="y")).spec.principal_axis == 1


def test_perturb_examples():
    f = ScalarField(np.array([0.3, 0.1, 0.2]))
    assert perturb_distinct(f) is f
    g = perturb_distinct(ScalarField(np.array([0.5, 0.0, 0.5, 1.0])))
    delta = 1e-12 * 1.0
    assert g.values[0] == 0.5 and g.values[2] == pytest.approx(0.5 + delta, abs=1e-24)
    flat = perturb_distinct(ScalarField(np.r_[np.zeros(7), 1.0]))
    assert len(np.unique(flat.values)) == 8
    assert flat.values[:7].max() - flat.values[:7].min() < 7 * 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=60), st.floats(0.01, 100))
def test_perturb_preserves_order(levels, scale):
    vals = np.array(levels, dtype=float) * scale
    f = ScalarField(vals)
    g = perturb_distinct(f)
    assert len(np.unique(g.values)) == len(vals)
    assert np.array_equal(g.rank, f.rank)
    span = np.ptp(vals) if np.ptp(vals) > 0 else 1.0
    assert np.all(np.abs(g.values - vals) < 1e-9 * span)


def test_field_validation():
    with pytest.raises(FieldError):
        ScalarField(np.array([0.0, np.nan]))
    with pytest.raises(FieldError):
        ScalarField(np.zeros((2, 2)))
