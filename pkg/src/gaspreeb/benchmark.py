"""Runtime scaling against triangles times Reeb edges."""

import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .pipeline import make_params, run

MIN_CASES = 5
MIN_SPREAD = 10.0


@dataclass
class BenchCase:
    name: str
    mesh: object
    field: str = "z"


def run_benchmark(cases, method="gasp-boundary", params=None, threads=1, repeats=1, n_bins=20):
    """Time the full pipeline per case and fit ``seconds ~ a * (T * E) + b``.

    ``T`` is the triangle count and ``E`` the Reeb edge count. The fastest
    of ``repeats`` runs is kept per case. Raises ValueError with fewer than
    five cases or a ``T * E`` spread under ten.
    """
    cases = list(cases)
    if len(cases) < MIN_CASES:
        raise ValueError(f"need at least {MIN_CASES} cases, got {len(cases)}")
    params = params or make_params(method)
    rows = []
    for case in cases:
        best, result = np.inf, None
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            result = run(case.mesh, case.field, method, params, threads, n_bins)
            best = min(best, time.perf_counter() - t0)
        n_tri, n_edges = case.mesh.n_triangles, len(result.reeb.edges)
        rows.append({"name": case.name, "triangles": n_tri, "edges": n_edges,
                     "work": n_tri * n_edges, "seconds": best})
    work = np.array([r["work"] for r in rows], dtype=np.float64)
    if work.max() < MIN_SPREAD * work.min():
        raise ValueError(f"triangles x edges must span at least {MIN_SPREAD}x")
    secs = np.array([r["seconds"] for r in rows])
    fit = stats.linregress(work, secs)
    return {
        "schema": 1,
        "method": method,
        "params": params.__dict__.copy(),
        "threads": threads,
        "repeats": repeats,
        "cases": rows,
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r2": float(fit.rvalue ** 2),
    }


def bench_csv(report):
    cols = ("name", "triangles", "edges", "work", "seconds")
    lines = [",".join(cols)]
    lines.extend(",".join(str(r[c]) for c in cols) for r in report["cases"])
    return "\n".join(lines) + "\n"
