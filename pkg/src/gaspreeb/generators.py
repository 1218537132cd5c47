"""Closed analytic test surfaces.

Every generator returns a normalized, outward-oriented, closed mesh. A
small fixed rotation is applied before normalization so that coordinate
height functions have no exact ties between neighboring vertices (grid
rings at equal height would otherwise produce spurious saddles once ties
are broken by index).
"""

import numpy as np

from .exceptions import MeshError
from .mesh import TriangleMesh, normalize, weld_and_clean

SHAPES = ("sphere", "torus", "modified-torus", "genus2", "cone")

# small generic tilt (radians about x, y, z)
GENERIC_TILT = (0.0131, 0.0217, 0.0071)


def _rotation(ax, ay, az):
    cx, sx, cy, sy, cz, sz = np.cos(ax), np.sin(ax), np.cos(ay), np.sin(ay), np.cos(az), np.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rz @ ry @ rx


def _finish(vertices, triangles, tilt=True):
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64)
    if tilt:
        v = v @ _rotation(*GENERIC_TILT).T
    p = v[t]
    volume = np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])).sum() / 6.0
    if volume < 0:
        t = t[:, ::-1]
    return normalize(TriangleMesh(v, t))


def _grid_triangles(m, n, wrap_m=True, wrap_n=True):
    """Triangulate an m x n vertex grid (vertex id i*n + j)."""
    tris = []
    for i in range(m if wrap_m else m - 1):
        i1 = (i + 1) % m
        for j in range(n if wrap_n else n - 1):
            j1 = (j + 1) % n
            a, b, c, d = i * n + j, i1 * n + j, i1 * n + j1, i * n + j1
            tris.append((a, b, c))
            tris.append((a, c, d))
    return np.array(tris, dtype=np.int64)


def torus_vertices(m, n, major=1.0, minor=0.4):
    """Torus standing upright: ring in the xz-plane, hole axis along y."""
    u = 2 * np.pi * np.arange(m) / m
    v = 2 * np.pi * np.arange(n) / n
    uu, vv = np.meshgrid(u, v, indexing="ij")
    rho = major + minor * np.cos(vv)
    pts = np.stack([rho * np.cos(uu), minor * np.sin(vv), rho * np.sin(uu)], axis=-1)
    return pts.reshape(-1, 3), uu.ravel(), vv.ravel()


def torus(m=48, n=24, major=1.0, minor=0.4):
    """Grid torus with ``m * n`` vertices and ``2 * m * n`` triangles."""
    if m < 3 or n < 3:
        raise MeshError("torus needs at least 3x3 grid")
    pts, _, _ = torus_vertices(m, n, major, minor)
    return _finish(pts, _grid_triangles(m, n))


def modified_torus(m=64, n=32, major=1.0, minor=0.4, horn=0.6, width=0.25, center=-0.25):
    """Upright torus with an upward-tilted horn on its right side.

    The horn adds a local maximum and a split saddle to the right branch,
    so the band between the two ring saddles has one component that
    contains extra critical points.
    """
    pts, uu, vv = torus_vertices(m, n, major, minor)
    du = np.angle(np.exp(1j * (uu - center)))
    dv = np.angle(np.exp(1j * vv))
    g = np.exp(-(du ** 2 + dv ** 2) / width ** 2)
    direction = np.array([0.5, 0.0, 1.0]) / np.sqrt(1.25)
    pts = pts + horn * g[:, None] * direction
    return _finish(pts, _grid_triangles(m, n))


def sphere(n_around=32, n_rings=None):
    """UV sphere with poles on the z axis."""
    n_rings = n_rings or max(3, n_around // 2)
    theta = np.pi * np.arange(1, n_rings) / n_rings
    phi = 2 * np.pi * np.arange(n_around) / n_around
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ring = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1).reshape(-1, 3)
    north, south = len(ring), len(ring) + 1
    v = np.vstack([ring, [[0, 0, 1]], [[0, 0, -1]]])
    tris = list(_grid_triangles(n_rings - 1, n_around, wrap_m=False))
    for j in range(n_around):
        j1 = (j + 1) % n_around
        tris.append((north, j, j1))
        last = (n_rings - 2) * n_around
        tris.append((south, last + j1, last + j))
    return _finish(v, tris)


def cone(n_around=32, n_rings=16, height=2.0, radius=1.0):
    """Closed upright cone: apex on top, flat disk base."""
    verts, tris = [[0.0, 0.0, height]], []
    phi = 2 * np.pi * np.arange(n_around) / n_around
    for k in range(1, n_rings + 1):
        s = k / n_rings
        verts.extend(np.stack([radius * s * np.cos(phi), radius * s * np.sin(phi),
                               np.full(n_around, height * (1 - s))], axis=1))
    # base rings from the rim inward
    for k in range(n_rings - 1, 0, -1):
        s = k / n_rings
        verts.extend(np.stack([radius * s * np.cos(phi), radius * s * np.sin(phi),
                               np.zeros(n_around)], axis=1))
    verts.append([0.0, 0.0, 0.0])
    center = len(verts) - 1
    ring = lambda k: 1 + (k - 1) * n_around  # noqa: E731  first vertex of ring k
    n_total = 2 * n_rings - 1
    for j in range(n_around):
        tris.append((0, ring(1) + j, ring(1) + (j + 1) % n_around))
    for k in range(1, n_total):
        for j in range(n_around):
            j1 = (j + 1) % n_around
            a, b = ring(k) + j, ring(k) + j1
            c, d = ring(k + 1) + j, ring(k + 1) + j1
            tris.append((a, c, d))
            tris.append((a, d, b))
    for j in range(n_around):
        tris.append((center, ring(n_total) + (j + 1) % n_around, ring(n_total) + j))
    return _finish(verts, tris)


def genus2(resolution=64, major=0.8, minor=0.25, separation=0.9, blend=0.08):
    """Two upright rings stacked along z and fused at the waist.

    Built by marching cubes over a smooth union of two torus distance
    functions; ``resolution`` is the number of grid cells along z.
    """
    from skimage.measure import marching_cubes

    zmax = separation + major + minor + 0.1
    xmax = major + minor + 0.1
    ymax = minor + 0.1
    h = 2 * zmax / resolution
    # irrational offset keeps grid nodes off the surface
    off = h * 0.37139
    xs = np.arange(-xmax - off, xmax + h, h)
    ys = np.arange(-ymax - off, ymax + h, h)
    zs = np.arange(-zmax - off, zmax + h, h)
    x, y, z = np.meshgrid(xs, ys, zs, indexing="ij")

    def ring(zc):
        return np.sqrt((np.sqrt(x ** 2 + (z - zc) ** 2) - major) ** 2 + y ** 2) - minor

    a, b = ring(-separation), ring(separation)
    sdf = -blend * np.logaddexp(-a / blend, -b / blend)
    verts, faces, _, _ = marching_cubes(sdf, level=0.0, spacing=(h, h, h))
    verts = verts + np.array([xs[0], ys[0], zs[0]])
    verts, faces = weld_and_clean(verts, faces)
    return _finish(verts, faces)


def generate(shape, resolution=None):
    """Dispatch by shape name; ``resolution`` is an int or ``"MxN"`` string."""
    dims = None
    if isinstance(resolution, str) and "x" in resolution:
        dims = tuple(int(x) for x in resolution.lower().split("x"))
        resolution = dims[0]
    elif resolution is not None:
        resolution = int(resolution)
    if resolution is not None and resolution < 8:
        raise MeshError("resolution must be at least 8")
    if shape == "sphere":
        return sphere(*(dims or (resolution or 32,)))
    if shape == "torus":
        return torus(*(dims or ((resolution or 48), (resolution or 48) // 2)))
    if shape == "modified-torus":
        return modified_torus(*(dims or ((resolution or 64), (resolution or 64) // 2)))
    if shape == "genus2":
        return genus2(resolution or 64)
    if shape == "cone":
        return cone(*(dims or (resolution or 32, max(4, (resolution or 32) // 2))))
    raise MeshError(f"unsupported shape {shape!r}; choose from {', '.join(SHAPES)}")
