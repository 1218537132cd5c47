import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import embedding, shape_setup
from gaspreeb.arcs import BARYCENTER
from gaspreeb.contour import marching_contour
from gaspreeb.gb import GbParams, barycenter_arc, gb_embed, laplacian_smooth
from gaspreeb.pathgraph import polyline_length


def test_params():
    assert GbParams().label == "15/15"
    with pytest.raises(ValueError):
        GbParams(sampling=0)
    with pytest.raises(ValueError):
        GbParams(smoothing=-1)


def test_single_segment_is_straight():
    mesh, field, reeb, dec, _ = shape_setup("sphere")
    emb = gb_embed(mesh, field, reeb, GbParams(1, 15), decomposer=dec)
    (arc,) = emb.arcs
    assert arc.kind == BARYCENTER and len(arc.points) == 2
    assert arc.isovalues.tolist() == [reeb.nodes[0].value, reeb.nodes[1].value]


def test_sphere_barycenters_follow_pole_axis():
    mesh, field, reeb, dec, _ = shape_setup("sphere")
    arc = embedding("sphere", "gb").arcs[0]
    a, b = np.asarray(reeb.nodes[0].position), np.asarray(reeb.nodes[1].position)
    u = (b - a) / np.linalg.norm(b - a)
    off = arc.info["barycenters"] - a
    perp = off - np.outer(off @ u, u)
    # contour barycenters of a sphere sit on its axis up to faceting
    assert np.linalg.norm(perp, axis=1).max() < 0.05


def test_smoothing_shortens_and_keeps_ends():
    mesh, field, reeb, dec, _ = shape_setup("torus")
    emb = gb_embed(mesh, field, reeb, GbParams(15, 15), decomposer=dec)
    for arc in emb.arcs:
        raw = arc.info["barycenters"]
        assert polyline_length(arc.points) <= polyline_length(raw) + 1e-12
        assert np.array_equal(arc.points[[0, -1]], raw[[0, -1]])


def test_smoothing_converges_to_chord():
    rng = np.random.default_rng(0)
    p = rng.normal(size=(9, 3))
    s = laplacian_smooth(p, 2000)
    t = np.linspace(0, 1, 9)[:, None]
    assert np.allclose(s, p[0] + t * (p[-1] - p[0]), atol=1e-9)
    assert np.array_equal(laplacian_smooth(p[:2], 5), p[:2])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 30))
def test_smoothing_commutes_with_reversal(seed, rounds):
    p = np.random.default_rng(seed).normal(size=(7, 3))
    assert np.allclose(laplacian_smooth(p[::-1], rounds), laplacian_smooth(p, rounds)[::-1])


def test_barycenter_independent_of_contour_start():
    mesh, field, reeb, dec, _ = shape_setup("sphere")
    cyl = dec.extract_all()[0]
    a, b = reeb.nodes
    arc = barycenter_arc(cyl, np.asarray(a.position), np.asarray(b.position), a.value, b.value,
                         GbParams(4, 0))
    c = marching_contour(cyl, arc.isovalues[1])
    for shift in (1, 5, 11):
        assert np.allclose(np.roll(c.points, shift, axis=0).mean(axis=0), arc.points[1])


def test_threads_same_output():
    mesh, field, reeb, dec, _ = shape_setup("genus2")
    one = gb_embed(mesh, field, reeb, decomposer=dec)
    many = gb_embed(mesh, field, reeb, threads=8, decomposer=dec)
    assert one.to_dict() == many.to_dict()
