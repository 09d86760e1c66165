"""``kmcluster`` command line: cluster a CSV, run the simulation studies, Gap, random stamps.

Exit codes: 0 success, 2 usage or input error, 3 infeasible request
(e.g. k above the number of distinct rows), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from . import io
from .core import InfeasibleError, NumericError, make_rng
from .evaluation import cer, count_singletons
from .experiments import gap_study, simulate, stamps_study, summarize
from .methods import METHOD_IDS, parse_methods, run_method
from .model_selection import gap_statistic
from .simgen import ScenarioConfig, ScenarioModel

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4


def _method(text: str) -> str:
    if text not in METHOD_IDS:
        raise argparse.ArgumentTypeError(f"unknown method {text!r} (choose from {', '.join(METHOD_IDS)})")
    return text


def _methods(text: str) -> list[str]:
    try:
        return parse_methods(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _phi(text: str) -> float:
    v = float(text)
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"phi must be a positive number, got {text}")
    return v


def _m_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"need 1 <= a <= b, got {text!r}")
    return list(range(a, b + 1))


def _emit_csv(path, header, rows) -> None:
    io.write_table(sys.stdout if path is None else path, header, rows)


def cmd_cluster(args) -> int:
    ds = io.read_csv(args.input, args.truth_col)
    if args.restarts > 1 and args.method in ("proposed", "em_gmm"):
        raise ValueError("--restarts applies only to randomly seeded k-means methods")
    t0 = time.perf_counter()
    res = run_method(args.method, ds.data, args.k, make_rng(args.seed), restarts=args.restarts)
    elapsed = time.perf_counter() - t0
    report = {
        "method": args.method,
        "seed": args.seed,
        "k": args.k,
        "n": ds.data.shape[0],
        "p": ds.data.shape[1],
    }
    if ds.truth is not None:
        report["cer"] = cer(ds.truth, res.labels).cer
    report.update(
        ssq=res.ssq,
        iterations=res.iterations,
        converged=res.converged,
        n_singletons=count_singletons(res.labels),
    )
    if not args.no_timing:
        report["wall_time"] = elapsed
    if args.out:
        io.write_labels(args.out, res.labels)
    text = io.format_report(report)
    if args.report:
        io.write_report(args.report, report)
    sys.stdout.write(text)
    return EXIT_OK


def _scenario(args) -> ScenarioConfig:
    return ScenarioConfig(model=ScenarioModel(args.scenario), phi=args.phi, outliers=args.outliers)


def _print_summary(summary: dict, stream, keys) -> None:
    for name, row in summary.items():
        label = name if isinstance(name, str) else " ".join(str(v) for v in name)
        fields = " ".join(f"{k}={io.fmt_float(row[k]) if isinstance(row[k], float) else row[k]}" for k in keys)
        print(f"{label}: {fields}", file=stream)


def cmd_simulate(args) -> int:
    records = simulate(_scenario(args), args.reps, args.methods, args.seed, args.threads)
    rows = [(r.method, r.rep, r.cer, r.n_singletons, 0.0 if args.no_timing else r.seconds)
            for r in records]
    _emit_csv(args.out, ["method", "rep", "cer", "n_singletons", "seconds"], rows)
    stream = sys.stdout if args.out else sys.stderr
    _print_summary(summarize(records), stream, ("reps", "failed", "mean_cer_pct", "mean_singletons"))
    return EXIT_OK


def cmd_gap(args) -> int:
    ds = io.read_csv(args.input, args.truth_col)
    g = gap_statistic(ds.data, args.kmax, args.b, args.method, make_rng(args.seed))
    rows = [(int(k), lw, gp, s) for k, lw, gp, s in zip(g.k_candidates, g.log_wk, g.gap, g.sk)]
    _emit_csv(args.out, ["k", "log_wk", "gap", "sk"], rows)
    stream = sys.stdout if args.out else sys.stderr
    print(f"k_hat: {g.k_hat}", file=stream)
    if g.fallback:
        print("fallback: no candidate met the rule; k_hat is the largest k", file=stream)
    if g.skipped:
        print(f"skipped: {' '.join(map(str, g.skipped))}", file=stream)
    return EXIT_OK


def cmd_gap_sim(args) -> int:
    records = gap_study(_scenario(args), args.reps, args.methods, args.kmax, args.b, args.seed,
                        args.threads)
    _emit_csv(args.out, ["method", "rep", "k_true", "k_hat"],
              [(r.method, r.rep, r.k_true, r.k_hat) for r in records])
    stream = sys.stdout if args.out else sys.stderr
    _print_summary(summarize(records), stream, ("reps", "pct_k_correct"))
    return EXIT_OK


def cmd_stamps(args) -> int:
    if args.input is None:
        ds = io.load_bundled_base()
    else:
        if args.truth_col is None:
            raise ValueError("--truth-col is required with --input")
        ds = io.read_csv(args.input, args.truth_col)
    records = stamps_study(ds.data, ds.truth, args.m_range, args.reps, args.methods, args.seed,
                           args.scale, args.threads, args.spread)
    summary = summarize(records, by_m=True)
    rows = [(name, m, row["reps"], row["failed"], row["mean_cer_pct"])
            for (name, m), row in summary.items()]
    _emit_csv(args.out, ["method", "m", "reps", "failed", "mean_cer_pct"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmcluster", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, many=False):
        sp.add_argument("--seed", type=_seed, default=0)
        if many:
            sp.add_argument("--methods", type=_methods, default=["proposed"],
                            help="comma separated method ids, or 'all'")
            sp.add_argument("--threads", type=int, default=None,
                            help="worker processes (default: KMCLUSTER_THREADS, 0 = all cores)")
            sp.add_argument("--reps", type=_positive, required=True)

    c = sub.add_parser("cluster", help="cluster a CSV file")
    c.add_argument("--input", required=True)
    c.add_argument("--k", type=_positive, required=True)
    c.add_argument("--method", type=_method, default="proposed")
    c.add_argument("--truth-col")
    c.add_argument("--out", help="labels CSV (row,label; labels are 1-based)")
    c.add_argument("--report", help="also write the key: value report here")
    c.add_argument("--restarts", type=_positive, default=1,
                   help="best-of-N restarts for randomly seeded k-means methods")
    c.add_argument("--no-timing", action="store_true", help="omit wall_time from the report")
    common(c)
    c.set_defaults(func=cmd_cluster)

    for name, func, hlp in (("simulate", cmd_simulate, "known-k benchmark on generated data"),
                            ("gap-sim", cmd_gap_sim, "Gap statistic k recovery on generated data")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--scenario", choices=[m.value for m in ScenarioModel], required=True)
        s.add_argument("--phi", type=_phi, required=True)
        s.add_argument("--outliers", action="store_true")
        s.add_argument("--out", help="results CSV (default: stdout)")
        common(s, many=True)
        if name == "simulate":
            s.add_argument("--no-timing", action="store_true", help="write 0.0 in the seconds column")
        else:
            s.add_argument("--kmax", type=_positive, default=14)
            s.add_argument("--b", type=_positive, default=20)
        s.set_defaults(func=func)

    g = sub.add_parser("gap", help="estimate k for a CSV with the Gap statistic")
    g.add_argument("--input", required=True)
    g.add_argument("--kmax", type=_positive, required=True)
    g.add_argument("--b", type=_positive, default=50)
    g.add_argument("--method", type=_method, default="proposed")
    g.add_argument("--truth-col", help="column to exclude from the features")
    g.add_argument("--out", help="gap table CSV (default: stdout)")
    common(g)
    g.set_defaults(func=cmd_gap)

    st = sub.add_parser("stamps", help="random-stamps experiment")
    st.add_argument("--input", help="base CSV (default: bundled two-group base)")
    st.add_argument("--truth-col")
    st.add_argument("--m-range", type=_m_range, default=list(range(1, 16)), help="a..b (default 1..15)")
    st.add_argument("--scale", type=float, default=10.0)
    st.add_argument("--spread", choices=["sd", "variance"], default="sd",
                    help="whether scale*s_j is the shift variance or standard deviation")
    st.add_argument("--out", help="summary CSV (default: stdout)")
    common(st, many=True)
    st.set_defaults(func=cmd_stamps)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"kmcluster: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"kmcluster: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"kmcluster: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
