"""End-to-end runs: mesh and field in, embedded Reeb graph out."""

import time
from dataclasses import dataclass, field

from .decomposition import DEFAULT_BINS, Decomposer
from .field import perturb_distinct
from .gasp import BOUNDARY, INTERIOR, GaspParams, gasp_embed
from .gb import GbParams, gb_embed
from .reeb import compute_reeb_graph
from .validation import check_field, check_mesh

METHODS = ("gasp-boundary", "gasp-interior", "gb")


@dataclass
class RunResult:
    mesh: object
    field: object
    reeb: object
    embedded: object
    timings: dict = field(default_factory=dict)


def make_params(method, **kw):
    """Parameter object for ``method`` from keyword arguments (unknown keys ignored)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "gb":
        keys = ("sampling", "smoothing")
        return GbParams(**{k: kw[k] for k in keys if kw.get(k) is not None})
    keys = ("spacing", "buffer", "budget", "refinements", "thin_iterations")
    return GaspParams(**{k: kw[k] for k in keys if kw.get(k) is not None})


def run(mesh, field_spec, method="gasp-boundary", params=None, threads=1, n_bins=DEFAULT_BINS):
    """Field, Reeb graph and arc embedding with per-stage wall-clock timings."""
    mesh = check_mesh(mesh)
    params = params or make_params(method)
    t0 = time.perf_counter()
    f = perturb_distinct(check_field(mesh, field_spec))
    t1 = time.perf_counter()
    reeb = compute_reeb_graph(mesh, f)
    t2 = time.perf_counter()
    dec = Decomposer(mesh, f, reeb, n_bins)
    if method == "gb":
        emb = gb_embed(mesh, f, reeb, params, threads=threads, decomposer=dec)
    else:
        mode = BOUNDARY if method == "gasp-boundary" else INTERIOR
        emb = gasp_embed(mesh, f, reeb, params, mode, threads=threads, decomposer=dec)
    t3 = time.perf_counter()
    timings = {"field": t1 - t0, "reeb": t2 - t1, "embed": t3 - t2, "total": t3 - t0}
    return RunResult(mesh, f, reeb, emb, timings)
