"""Command line entry point: ``hybrid-simplex {solve,generate,bench,sweep}``.

Exit codes: 0 optimal, 1 usage/parse error, 2 unbounded, 3 infeasible,
4 iteration limit.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from .bench import emit_csv, emit_sweep_csv, run_bench, run_theta_sweep
from .engine import EngineConfig, run_simplex
from .errors import SimplexError
from .generator import GenSpec, generate_dense
from .lp_core import PivotRule, Status, Tolerances
from .mps import read_mps, to_raw_lp, write_mps
from .partition import parse_lane_spec

EXIT_CODES = {
    Status.OPTIMAL: 0,
    Status.UNBOUNDED: 2,
    Status.INFEASIBLE: 3,
    Status.ITERATION_LIMIT: 4,
}

_GEN_INPUT = re.compile(r"^gen:(\d+)x(\d+)(?::(\d+))?$")


def load_problem(source: str):
    """Read an MPS path (or ``-``), or build ``gen:<m>x<n>[:<seed>]`` in memory."""
    match = _GEN_INPUT.match(source)
    if match:
        rows, cols, seed = match.groups()
        return generate_dense(GenSpec(int(rows), int(cols), int(seed or 0)))
    return to_raw_lp(read_mps(source))


def _csv_ints(text: str):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("lane counts must be positive integers")
    return values


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    lanes, workers = parse_lane_spec(args.lanes)
    tol = Tolerances(optimality=args.tol_opt, pivot=args.tol_pivot)
    config = EngineConfig(lanes=lanes, cpu_workers=workers, theta=args.theta,
                          pivot_rule=args.rule, tolerances=tol, max_iterations=args.max_iters,
                          trace=True, threaded=not args.single_context)
    problem = load_problem(args.input)
    solution, stats = run_simplex(problem, config)
    print(f"status: {solution.status.value}")
    print(f"objective: {solution.objective!r}")
    print(f"iterations: {solution.iterations} (phase I: {solution.phase_one_iterations})")
    print(f"time_per_iter: {stats.time_per_iteration:.6f}")
    if args.print_primal and solution.status is Status.OPTIMAL:
        for j, value in enumerate(solution.primal):
            print(f"x[{j}] = {float(value)!r}")
    if args.trace:
        lines = [f"{p.iteration},{p.entering_col},{p.leaving_row},{p.pivot_value!r},{p.objective_after!r}"
                 for p in solution.pivot_trace]
        _write(args.trace, "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_CODES[solution.status]


def cmd_generate(args) -> int:
    problem = generate_dense(GenSpec(args.rows, args.cols, args.seed))
    _write(args.out, write_mps(problem))
    return 0


def cmd_bench(args) -> int:
    problem = load_problem(args.input)
    report = run_bench(problem, args.lane_counts, args.reps, pivot_rule=args.rule,
                       max_iterations=args.max_iters, label=Path(args.input).stem)
    _write(args.csv, emit_csv(report))
    return 0


def cmd_sweep(args) -> int:
    lanes, workers = parse_lane_spec(args.lanes)
    problem = load_problem(args.input)
    worker_counts = args.cpu_workers or [workers]
    report = run_theta_sweep(problem, lanes, args.theta_step, cpu_workers=worker_counts,
                             repetitions=args.reps, pivot_rule=args.rule,
                             max_iterations=args.max_iters, label=Path(args.input).stem)
    _write(args.csv, emit_sweep_csv(report))
    for label, theta in report.best.items():
        print(f"best theta for {label}: {theta:g}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybrid-simplex",
                                     description="Dense full-tableau simplex over weighted compute lanes.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    rule = dict(choices=[r.value for r in PivotRule], default="dantzig")

    p = sub.add_parser("solve", help="solve one LP")
    p.add_argument("--input", required=True, help="MPS path, '-' for stdin, or gen:<m>x<n>[:<seed>]")
    p.add_argument("--format", choices=["mps"], default="mps")
    p.add_argument("--lanes", default="cpu:1", help="cpu:<workers>[,dev:<capability>]*")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--rule", **rule)
    p.add_argument("--tol-opt", type=float, default=1e-7)
    p.add_argument("--tol-pivot", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--trace", metavar="PATH", help="write iter,k,r,pivot_value,objective per pivot")
    p.add_argument("--print-primal", action="store_true")
    p.add_argument("--single-context", action="store_true", help="run all lanes serially")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a seeded random dense LP as MPS")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="speedup/efficiency over CPU worker counts")
    p.add_argument("--input", required=True)
    p.add_argument("--lane-counts", type=_csv_ints, default=[1, 2, 4, 8])
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--csv", default="-")
    p.add_argument("--rule", **rule)
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="time per iteration over a theta grid")
    p.add_argument("--input", required=True)
    p.add_argument("--lanes", required=True)
    p.add_argument("--theta-step", type=float, default=0.1)
    p.add_argument("--cpu-workers", type=_csv_ints, default=None,
                   help="extra time columns, one per CPU worker count")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--csv", default="-")
    p.add_argument("--rule", **rule)
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SimplexError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
