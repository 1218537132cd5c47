"""Command-line front end: ``gaspreeb {generate,embed,compare,bench}``."""

import argparse
import logging
import os
import sys

from . import __version__
from .benchmark import BenchCase, bench_csv, run_benchmark
from .decomposition import DEFAULT_BINS, dump_cylinders
from .exceptions import FieldError, MeshError, ThinFeatureError, TopologyError
from .generators import SHAPES, generate
from .io import (ensure_dir, mesh_digest, read_json, write_arcs, write_json, write_reeb,
                 write_vtk)
from .mesh import load_mesh, save_obj
from .metrics import DEFAULT_TOLERANCE, METRIC_NAMES, evaluate
from .pipeline import METHODS, make_params, run
from .spatial import SpatialIndex

logger = logging.getLogger("gaspreeb")

EXIT_OK, EXIT_INPUT, EXIT_TOPOLOGY, EXIT_INTERNAL = 0, 2, 3, 4


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage, self.exc = stage, exc


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _resolution(text):
    if text is None:
        return None
    return text if "x" in text.lower() else int(text)


def _load_input(args):
    if bool(args.mesh) == bool(args.generate):
        raise MeshError("give exactly one of --mesh or --generate")
    if args.mesh:
        return load_mesh(args.mesh), os.path.abspath(args.mesh)
    shape, _, res = args.generate.partition(":")
    return generate(shape, _resolution(res or None)), f"generate:{args.generate}"


def _add_params(p):
    p.add_argument("--method", choices=METHODS, default="gasp-boundary")
    p.add_argument("--spacing", type=float, default=0.05, help="contour spacing S (function units)")
    p.add_argument("--buffer", type=float, default=0.05, help="interior buffer B (model units)")
    p.add_argument("--budget", type=int, default=40, help="candidate points per contour")
    p.add_argument("--refinements", type=int, default=2)
    p.add_argument("--sampling", type=int, default=15, help="GB segments per arc")
    p.add_argument("--smoothing", type=int, default=15, help="GB smoothing rounds")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--field", default="z", help="x, y, z or geo:<top|bottom|left|right|front|back>")


def _params_from(args):
    if args.bins < 1:
        raise ValueError("--bins must be positive")
    if args.threads < 1:
        raise ValueError("--threads must be positive")
    return make_params(args.method, spacing=args.spacing, buffer=args.buffer, budget=args.budget,
                       refinements=args.refinements, sampling=args.sampling,
                       smoothing=args.smoothing)


def _run_config(args, source, params):
    return {
        "mesh": source,
        "field": args.field,
        "method": args.method,
        "params": dict(sorted(params.__dict__.items())),
        "bins": args.bins,
        "threads": args.threads,
        "tolerance": getattr(args, "tolerance", None),
        "deterministic": True,
    }


def cmd_generate(args):
    with _Stage("generate"):
        mesh = generate(args.shape, _resolution(args.resolution))
    with _Stage("write"):
        out = args.output or f"{args.shape}.obj"
        if os.path.dirname(out):
            ensure_dir(os.path.dirname(out))
        save_obj(mesh, out)
    print(f"wrote {out}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles, "
          f"Euler characteristic {mesh.euler_characteristic}")
    return EXIT_OK


def cmd_embed(args):
    with _Stage("config"):
        params = _params_from(args)
        if args.tolerance <= 0:
            raise ValueError("--tolerance must be positive")
    with _Stage("load"):
        mesh, source = _load_input(args)
    with _Stage("embed"):
        result = run(mesh, args.field, args.method, params, args.threads, args.bins)
    with _Stage("metrics"):
        index = SpatialIndex(mesh) if mesh.is_closed else None
        axis = result.field.spec.principal_axis
        meta = _run_config(args, source, params)
        meta.update({"mesh_digest": mesh_digest(mesh), "triangles": mesh.n_triangles,
                     "edges": len(result.reeb.edges), "timings": result.timings})
        report = evaluate(result.embedded, index, axis, args.tolerance, meta)
    with _Stage("write"):
        out = ensure_dir(args.out_dir)
        write_reeb(os.path.join(out, "reeb.json"), result.reeb)
        write_arcs(os.path.join(out, "arcs.json"), result.embedded)
        write_vtk(os.path.join(out, "arcs.vtk"), result.embedded)
        write_json(os.path.join(out, "metrics.json"), report.to_dict())
        with open(os.path.join(out, "metrics.csv"), "w", newline="\n") as fh:
            fh.write(report.to_csv())
        if args.dump_cylinders:
            from .decomposition import Decomposer
            dump_cylinders(Decomposer(mesh, result.field, result.reeb, args.bins).extract_all(),
                           os.path.join(out, "cylinders"))
    means = report.means
    print(f"{args.method}: {len(result.embedded.arcs)} arcs, "
          + ", ".join(f"{k}={v:.4g}" for k, v in means.items() if v is not None))
    return EXIT_OK


def cmd_compare(args):
    with _Stage("load"):
        a, b = read_json(args.a), read_json(args.b)
        for key in ("mesh_digest", "field"):
            if a["metadata"].get(key) != b["metadata"].get(key):
                raise ValueError(f"runs differ in {key}: {a['metadata'].get(key)!r} vs "
                                 f"{b['metadata'].get(key)!r}")
    with _Stage("compare"):
        rows = {}
        for name in METRIC_NAMES:
            va, vb = a["means"].get(name), b["means"].get(name)
            delta = None
            if isinstance(va, (int, float)) and isinstance(vb, (int, float)):
                delta = vb - va
            rows[name] = {"a": va, "b": vb, "delta": delta}
        out = {
            "schema": 1,
            "mesh_digest": a["metadata"].get("mesh_digest"),
            "field": a["metadata"].get("field"),
            "a": {"method": a["metadata"].get("method"), "params": a["metadata"].get("params")},
            "b": {"method": b["metadata"].get("method"), "params": b["metadata"].get("params")},
            "metrics": rows,
        }
    with _Stage("write"):
        path = args.output or os.path.join(ensure_dir(args.out_dir), "compare.json")
        write_json(path, out)
    for name, r in rows.items():
        print(f"{name:20s} {r['a']!s:>22} {r['b']!s:>22} {r['delta']!s:>22}")
    return EXIT_OK


def cmd_bench(args):
    with _Stage("config"):
        params = _params_from(args)
        sizes = [s.strip() for s in args.resolutions.split(",") if s.strip()]
    with _Stage("generate"):
        cases = [BenchCase(f"{args.shape}-{s}", generate(args.shape, _resolution(s)), args.field)
                 for s in sizes]
    with _Stage("bench"):
        report = run_benchmark(cases, args.method, params, args.threads, args.repeats, args.bins)
        report["config"] = _run_config(args, f"generate:{args.shape}", params)
        report["config"]["resolutions"] = sizes
    with _Stage("write"):
        out = ensure_dir(args.out_dir)
        write_json(os.path.join(out, "bench.json"), report)
        with open(os.path.join(out, "bench.csv"), "w", newline="\n") as fh:
            fh.write(bench_csv(report))
    for r in report["cases"]:
        print(f"{r['name']:>20s} T={r['triangles']:7d} E={r['edges']:3d} {r['seconds']:.3f}s")
    print(f"slope={report['slope']:.3e} s/(T*E)  R^2={report['r2']:.3f}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="gaspreeb", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an analytic test mesh")
    p.add_argument("shape", choices=SHAPES)
    p.add_argument("--resolution", help="grid size N or MxN")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="compute and embed a Reeb graph")
    p.add_argument("--mesh", help="OBJ or ASCII PLY file")
    p.add_argument("--generate", help="shape[:resolution], e.g. torus:48x24")
    _add_params(p)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="on-surface distance for the outside measures")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--dump-cylinders", action="store_true")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("compare", help="compare two metrics.json files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="runtime scaling over a generated family")
    p.add_argument("--shape", choices=SHAPES, default="torus")
    p.add_argument("--resolutions", default="32x32,48x48,80x64,128x96,160x160")
    p.add_argument("--repeats", type=int, default=1)
    _add_params(p)
    p.add_argument("--out-dir", default="bench")
    p.set_defaults(func=cmd_bench)
    return parser


def _exit_code(exc):
    if isinstance(exc, (TopologyError, ThinFeatureError)):
        return EXIT_TOPOLOGY
    if isinstance(exc, (MeshError, FieldError, ValueError, OSError, KeyError)):
        return EXIT_INPUT
    return EXIT_INTERNAL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as err:
        print(f"gaspreeb: error {err}", file=sys.stderr)
        if args.verbose:
            logger.exception("details")
        return _exit_code(err.exc)


if __name__ == "__main__":
    sys.exit(main())
