"""Geometric barycenter embedding, the comparison baseline.

Every arc starts as the straight segment between its two critical points,
sampled at evenly spaced function values. Each sample is moved to the
barycenter of the arc's own contour at that value, and the resulting
polyline is relaxed by Laplacian smoothing with fixed endpoints.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .arcs import BARYCENTER, EmbeddedArc, assemble
from .contour import marching_contour
from .decomposition import DEFAULT_BINS, Decomposer


@dataclass(frozen=True)
class GbParams:
    """Baseline parameters: ``sampling`` segments per arc, ``smoothing`` rounds."""

    sampling: int = 15
    smoothing: int = 15

    def __post_init__(self):
        if self.sampling < 1:
            raise ValueError(f"sampling must be at least 1, got {self.sampling}")
        if self.smoothing < 0:
            raise ValueError(f"smoothing must be non-negative, got {self.smoothing}")

    @property
    def label(self):
        return f"{self.sampling}/{self.smoothing}"


def laplacian_smooth(points, iterations):
    """Jacobi rounds of ``p_i <- (p_{i-1} + p_{i+1}) / 2``; ends stay fixed."""
    p = np.array(points, dtype=np.float64)
    for _ in range(iterations):
        if len(p) < 3:
            break
        p[1:-1] = 0.5 * (p[:-2] + p[2:])
    return p


def barycenter_arc(cylinder, start, end, f_j, f_k, params):
    isos = f_j + (f_k - f_j) * np.arange(1, params.sampling) / params.sampling
    mids = [marching_contour(cylinder, v).points.mean(axis=0) for v in isos]
    raw = np.vstack([start, *mids, end]) if mids else np.vstack([start, end])
    pts = laplacian_smooth(raw, params.smoothing)
    return EmbeddedArc(cylinder.edge, -1, -1, -1, pts, np.r_[f_j, isos, f_k], BARYCENTER,
                       info={"barycenters": raw})


def _embed_group(dec, key, params):
    reeb = dec.reeb
    nj, nk = reeb.nodes[key[0]], reeb.nodes[key[1]]
    cyls = dec.extract_group(*key)
    start, end = np.asarray(nj.position), np.asarray(nk.position)
    return [barycenter_arc(cyls[i], start, end, nj.value, nk.value, params)
            for i in reeb.groups()[key]]


def gb_embed(mesh, field, reeb, params=None, threads=1, n_bins=DEFAULT_BINS, decomposer=None):
    """Barycenter embedding of every arc of ``reeb``."""
    params = params or GbParams()
    dec = decomposer or Decomposer(mesh, field, reeb, n_bins)
    keys = list(reeb.groups())
    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda k: _embed_group(dec, k, params), keys))
    else:
        chunks = [_embed_group(dec, k, params) for k in keys]
    return assemble(reeb, [a for c in chunks for a in c], "gb", asdict(params))
