"""Command-line entry point: ``solve``, ``membership``, ``bench`` and ``gen``.

Exit codes: 0 for an epsilon-solution (or near point), 2 for a
normal-equation solution, 3 for a certified unsolvable system, 4 for a
membership witness and 1 for errors or inconclusive runs.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import sys

from .bench import CSV_HEADER, DEFAULT_EPSILONS, METHODS, row_values, run_grid, summarize
from .instances import InstanceSpec, Kind, export_instance, generate
from .linalg import read_matrix_market, read_vector, write_vector
from .membership import CsvTrace, MembershipTag, run_membership
from .solver import InconclusiveError, SolverConfig, SolveTag, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NORMAL_EQ = 2
EXIT_UNSOLVABLE = 3
EXIT_WITNESS = 4

SOLVE_EXIT = {
    SolveTag.EPS_SOLUTION: EXIT_OK,
    SolveTag.NORMAL_EQ_EPS_SOLUTION: EXIT_NORMAL_EQ,
    SolveTag.UNSOLVABLE: EXIT_UNSOLVABLE,
}


def _trace_ctx(path):
    return CsvTrace(path) if path else contextlib.nullcontext(None)


def _finite(value):
    return value if value is None or math.isfinite(value) else None


def cmd_solve(args) -> int:
    A = read_matrix_market(args.A)
    b = read_vector(args.b)
    cfg = SolverConfig(epsilon=args.epsilon, r0=args.r0, radius_cap=args.radius_cap,
                       pivot_mode=args.pivot_mode, max_iters_total=args.max_iters,
                       sigma_star_hint=args.sigma_star, time_limit=args.time_limit,
                       unsolvable_margin=args.unsolvable_margin)
    with _trace_ctx(args.trace) as trace:
        try:
            out = solve(A, b, cfg, trace=trace)
        except InconclusiveError as exc:
            print(json.dumps({"tag": "Inconclusive", "message": str(exc),
                              "iterations": exc.state.iterations, "radius_history": exc.radius_history}))
            return EXIT_ERROR
    if args.x_out:
        write_vector(args.x_out, out.x)
    print(out.to_json())
    return SOLVE_EXIT[out.tag]


def cmd_membership(args) -> int:
    A = read_matrix_market(args.A)
    b = read_vector(args.b)
    with _trace_ctx(args.trace) as trace:
        res = run_membership(A, b, args.radius, args.epsilon, max_iters=args.max_iters,
                             pivot_mode=args.pivot_mode, trace=trace)
    report = {"tag": res.tag.value, "gap": res.state.gap, "iterations": res.state.iterations,
              "radius": res.state.r}
    if res.certificate is not None:
        cert = res.certificate
        report.update(delta_lower=cert.delta_lower, delta_upper=cert.delta_upper,
                      radius_lower_bound=_finite(cert.radius_lower_bound),
                      separation_bound=cert.separation_bound)
    if args.x_out:
        write_vector(args.x_out, res.state.x_prime)
    print(json.dumps(report))
    return {MembershipTag.NEAR_POINT: EXIT_OK, MembershipTag.WITNESS: EXIT_WITNESS}.get(res.tag, EXIT_ERROR)


def cmd_bench(args) -> int:
    cfg = SolverConfig(pivot_mode=args.pivot_mode, r0=args.r0, radius_cap=args.radius_cap,
                       max_iters_total=args.max_iters, time_limit=args.time_limit)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)

        def stream(row):
            writer.writerow(row_values(row))
            fh.flush()

        rows = run_grid(args.kinds, args.dims, args.eps, args.seeds, args.methods,
                        consistent=not args.inconsistent, config=cfg, on_row=stream)
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summarize(rows), fh, indent=2)
    failed = sum(r.outcome_tag == "error" for r in rows)
    print(f"{len(rows)} rows written to {args.out} ({failed} errors)")
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = InstanceSpec(args.kind, args.m, args.n if args.n else args.m, args.seed,
                        consistent=not args.inconsistent, distribution=args.distribution)
    paths = export_instance(generate(spec), args.out)
    print(json.dumps(paths))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triangle-linsolve",
                                     description="Triangle Algorithm for Ax = b, with a BiCGSTAB benchmark.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--pivot-mode", choices=["standard", "strict"], default="standard")
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--trace", help="write a per-iteration CSV trace to this path")

    p = sub.add_parser("solve", help="solve one system read from Matrix Market files")
    p.add_argument("A")
    p.add_argument("b")
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--r0", type=float)
    p.add_argument("--radius-cap", type=float)
    p.add_argument("--sigma-star", type=float, help="lower bound on the smallest positive singular value")
    p.add_argument("--unsolvable-margin", type=float,
                   help="minimum (b - Ax)^T b for an unsolvability verdict (default 2*epsilon; inf disables)")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--x-out", help="write the solution vector here")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("membership", help="test whether b is near {Ax : ||x|| <= radius}")
    p.add_argument("A")
    p.add_argument("b")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--x-out")
    common(p)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    p.add_argument("--kinds", nargs="+", default=[k.value for k in Kind], choices=[k.value for k in Kind])
    p.add_argument("--dims", nargs="+", type=int, default=[100])
    p.add_argument("--eps", nargs="+", type=float, default=list(DEFAULT_EPSILONS))
    p.add_argument("--seeds", nargs="+", type=int, default=[1])
    p.add_argument("--methods", nargs="+", default=["TA", "BiCGSTAB"], choices=METHODS)
    p.add_argument("--inconsistent", action="store_true", help="add a component orthogonal to range(A)")
    p.add_argument("--r0", type=float)
    p.add_argument("--radius-cap", type=float)
    p.add_argument("--time-limit", type=float, help="per-solve wall-clock budget in seconds")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="write median-over-seeds JSON summary here")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a random instance as Matrix Market files")
    p.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distribution", choices=["uniform", "gaussian"], default="uniform")
    p.add_argument("--inconsistent", action="store_true")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if getattr(args, "max_iters", None) is None and args.command in ("solve", "bench"):
        args.max_iters = SolverConfig.max_iters_total
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
