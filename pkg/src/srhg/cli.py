"""Command line front end: ``srhg generate|verify|stats|bench``."""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from pathlib import Path

from .geometry import ModelParams
from .oracle import ORACLE_MAX_N, compare, materialize_points, naive_edges
from .parallel import generate
from .sinks import BinaryWriter, CollectSink, DegreeSink, FingerprintSink, TeeSink, TextWriter
from .stats import build_report

FORMATS = ("text", "binary", "fingerprint", "none")
BENCH_FIELDS = ("n", "avg_degree", "gamma", "P", "workers", "seconds", "edges_per_sec", "overestimation_ratio")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _model_args(p: argparse.ArgumentParser, *, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("-n", "--nodes", type=_positive_int, required=True, help="number of vertices")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", type=float, help="power-law exponent (> 2)")
    g.add_argument("--alpha", type=float, help="radial dispersion (> 1/2)")
    d = p.add_mutually_exclusive_group(required=True)
    d.add_argument("--avg-degree", type=float, help="target average degree")
    d.add_argument("-C", "--radial-const", type=float, help="additive radius constant C in R = 2 ln n + C")


def _run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1,
                   help="worker threads (default: hardware parallelism)")
    p.add_argument("--chunks", type=_positive_int, default=None,
                   help="angular chunks P; fixes the graph (default: worker count)")
    p.add_argument("--cell-target", type=_positive_int, default=8, help="target points per cell")


def _params(args, n: int | None = None) -> ModelParams:
    P = args.chunks if args.chunks is not None else args.workers
    kw = {"gamma": args.gamma} if args.gamma is not None else {"alpha": args.alpha}
    if getattr(args, "avg_degree", None) is not None:
        kw["avg_degree"] = args.avg_degree
    else:
        kw["C"] = args.radial_const
    return ModelParams.create(n if n is not None else args.nodes, seed=args.seed, P=P, **kw)


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout.buffer, False
    return open(path, "wb"), True


def cmd_generate(args) -> int:
    params = _params(args)
    fp = FingerprintSink()
    stream, close = (None, False) if args.format in ("fingerprint", "none") else _open_output(args.output)
    try:
        writer = None
        if args.format == "text":
            writer = TextWriter(stream)
        elif args.format == "binary":
            writer = BinaryWriter(stream)
        degrees = DegreeSink(params.n) if args.report_degrees else None
        result = generate(params, workers=args.workers, sink=TeeSink(fp, writer, degrees),
                          cell_target=args.cell_target)
        if args.format == "fingerprint":
            out, close_fp = _open_output(args.output)
            out.write(f"{fp.value}\n".encode("ascii"))
            if close_fp:
                out.close()
            else:
                out.flush()
        elif stream is not None:
            stream.flush()
    finally:
        if close:
            stream.close()
    report = build_report(params, result, fp.value, degrees.degrees if degrees is not None else None)
    if not args.quiet:
        sys.stderr.write(report.to_text())
    return 0


def cmd_verify(args) -> int:
    if args.nodes > ORACLE_MAX_N:
        sys.stderr.write(f"verify: n={args.nodes} exceeds the oracle limit of {ORACLE_MAX_N}\n")
        return 2
    params = _params(args)
    sink = CollectSink()
    generate(params, workers=args.workers, sink=sink, cell_target=args.cell_target,
             fault_index=args.inject_fault)
    trace = materialize_points(params, cell_target=args.cell_target)
    oracle = naive_edges(trace, params.R)
    rep = compare(sink.edges(), oracle, trace, params.R)
    print(f"n={params.n} alpha={params.alpha} R={params.R:.12g} P={params.P} seed={params.seed} "
          f"edges={len(oracle)} {rep.summary()}")
    for label, pairs in (("missing", rep.missing), ("extra", rep.extra)):
        for u, v in pairs[:10]:
            print(f"{label} {u} {v}")
    print("OK" if rep.ok else "MISMATCH")
    return 0 if rep.ok else 1


def cmd_stats(args) -> int:
    params = _params(args)
    fp = FingerprintSink()
    deg = DegreeSink(params.n)
    result = generate(params, workers=args.workers, sink=TeeSink(fp, deg), cell_target=args.cell_target)
    report = build_report(params, result, fp.value, deg.degrees, d_min=args.d_min)
    out, close = (sys.stdout, False) if args.output in (None, "-") else (open(args.output, "w"), True)
    try:
        out.write(report.to_csv())
    finally:
        if close:
            out.close()
    if args.annulus_csv:
        Path(args.annulus_csv).write_text(report.annulus_csv())
    if args.plot_dir:
        from .plotting import annulus_work_figure, degree_distribution_figure

        d = Path(args.plot_dir)
        d.mkdir(parents=True, exist_ok=True)
        degree_distribution_figure(deg.degrees, d / "degree_ccdf.png", gamma=params.gamma,
                                   gamma_hat=report.gamma_hat, d_min=report.d_min)
        annulus_work_figure(report.per_annulus, d / "annulus_overestimation.png")
    if not args.quiet:
        sys.stderr.write(report.to_text())
    return 0


def cmd_bench(args) -> int:
    rows = []
    out, close = (sys.stdout, False) if args.output in (None, "-") else (open(args.output, "w", newline=""), True)
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        for n, deg, gamma in itertools.product(args.sizes, args.avg_degrees, args.gammas):
            params = ModelParams.create(n, gamma=gamma, avg_degree=deg, seed=args.seed,
                                        P=args.chunks if args.chunks is not None else args.workers)
            fp = FingerprintSink()
            result = generate(params, workers=args.workers, sink=fp, cell_target=args.cell_target)
            secs = result.seconds
            row = dict(n=n, avg_degree=deg, gamma=gamma, P=params.P, workers=args.workers,
                       seconds=round(secs, 6), edges_per_sec=fp.edges / secs if secs > 0 else float("inf"),
                       overestimation_ratio=result.distance_computations / max(fp.edges, 1))
            w.writerow(row)
            out.flush()
            rows.append(row)
    finally:
        if close:
            out.close()
    if args.plot_dir:
        from .plotting import throughput_figure

        d = Path(args.plot_dir)
        d.mkdir(parents=True, exist_ok=True)
        throughput_figure(rows, d / "throughput.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srhg", description="Streaming threshold random hyperbolic graph generator.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="stream an edge list")
    _model_args(g)
    _run_args(g)
    g.add_argument("--format", choices=FORMATS, default="text")
    g.add_argument("-o", "--output", default=None, help="output file (default: standard output)")
    g.add_argument("--report-degrees", action="store_true", help="also fit the tail exponent in the report")
    g.add_argument("-q", "--quiet", action="store_true", help="suppress the report on standard error")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="compare against the all-pairs oracle")
    _model_args(v)
    _run_args(v)
    v.add_argument("--inject-fault", type=int, default=-1, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="report CSV with optional figures")
    _model_args(s)
    _run_args(s)
    s.add_argument("--d-min", type=float, default=None, help="tail cutoff for the exponent fit")
    s.add_argument("-o", "--output", default=None, help="CSV file (default: standard output)")
    s.add_argument("--annulus-csv", default=None, help="write per-annulus counters here")
    s.add_argument("--plot-dir", default=None, help="write PNG figures into this directory")
    s.add_argument("-q", "--quiet", action="store_true")
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="time a parameter grid")
    b.add_argument("--sizes", type=_positive_int, nargs="+", default=[10**6])
    b.add_argument("--avg-degrees", type=float, nargs="+", default=[4, 16, 64, 256])
    b.add_argument("--gammas", type=float, nargs="+", default=[2.2, 2.6, 3.0])
    _run_args(b)
    b.add_argument("-o", "--output", default=None)
    b.add_argument("--plot-dir", default=None)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"srhg: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
