"""Shared meshes, cached pipeline runs and the acceptance summary."""

import functools

import numpy as np
import pytest

from gaspreeb.decomposition import Decomposer
from gaspreeb.field import ScalarField, make_field, perturb_distinct
from gaspreeb.gasp import GaspParams, gasp_embed
from gaspreeb.gb import GbParams, gb_embed
from gaspreeb.generators import generate
from gaspreeb.mesh import TriangleMesh
from gaspreeb.reeb import (CriticalPoint, ReebEdge, ReebGraph, VertexKind,
                           compute_reeb_graph)
from gaspreeb.spatial import SpatialIndex

# genus-2 resolution that keeps the surface under 10k triangles
GENUS2_RES = 60

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def shape_mesh(shape, resolution=None):
    if shape == "genus2" and resolution is None:
        resolution = GENUS2_RES
    return generate(shape, resolution)


@functools.lru_cache(maxsize=None)
def shape_setup(shape, axis="z", resolution=None):
    """``(mesh, field, reeb, decomposer, index)`` for a generated shape."""
    mesh = shape_mesh(shape, resolution)
    field = perturb_distinct(make_field(mesh, axis))
    reeb = compute_reeb_graph(mesh, field)
    return mesh, field, reeb, Decomposer(mesh, field, reeb), SpatialIndex(mesh)


@functools.lru_cache(maxsize=None)
def embedding(shape, method, spacing=0.05, buffer=0.05, sampling=15, smoothing=15, axis="z"):
    mesh, field, reeb, dec, _ = shape_setup(shape, axis)
    if method == "gb":
        return gb_embed(mesh, field, reeb, GbParams(sampling, smoothing), decomposer=dec)
    mode = method.split("-")[1]
    return gasp_embed(mesh, field, reeb, GaspParams(spacing=spacing, buffer=buffer), mode,
                      decomposer=dec)


def grid_strip(nx=11, ny=3, width=1.0, height=0.2):
    """Flat open strip in the xy-plane, triangulated on a regular grid."""
    xs, ys = np.linspace(0, width, nx), np.linspace(0, height, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    v = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    t = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a, b, c, d = i * ny + j, (i + 1) * ny + j, (i + 1) * ny + j + 1, i * ny + j + 1
            t += [(a, b, c), (a, c, d)]
    return TriangleMesh(v, np.array(t))


def open_tube(n_around=32, n_rings=9, radius=1.0, height=2.0):
    """Open circular tube around the z axis (planar circular contours)."""
    phi = 2 * np.pi * np.arange(n_around) / n_around
    z = np.linspace(0, height, n_rings)
    v = np.array([[radius * np.cos(p), radius * np.sin(p), h] for h in z for p in phi])
    t = []
    for k in range(n_rings - 1):
        for j in range(n_around):
            j1 = (j + 1) % n_around
            a, b = k * n_around + j, k * n_around + j1
            c, d = (k + 1) * n_around + j, (k + 1) * n_around + j1
            t += [(a, b, d), (a, d, c)]
    return TriangleMesh(v, np.array(t))


def flat_strip_case(nx=21, ny=5, slope=0.01):
    """Flat strip with a shallow field and a hand-made one-edge Reeb graph.

    The field rises along the diagonal, so its span (about ``1.2 * slope``)
    is far below the default contour spacing and the edge is thin.
    """
    mesh = grid_strip(nx, ny, 1.0, 0.2)
    field = ScalarField(slope * (mesh.vertices[:, 0] + mesh.vertices[:, 1]))
    lo, hi = int(np.argmin(field.values)), int(np.argmax(field.values))
    nodes = tuple(
        CriticalPoint(v, tuple(mesh.vertices[v]), float(field.values[v]), kind)
        for v, kind in ((lo, VertexKind.MINIMUM), (hi, VertexKind.MAXIMUM))
    )
    return mesh, field, ReebGraph(nodes, (ReebEdge(0, 1),))


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
