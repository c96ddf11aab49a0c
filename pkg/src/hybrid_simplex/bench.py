"""Speedup / efficiency benchmarks and the theta sweep."""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .engine import EngineConfig, run_simplex
from .errors import CertificateError, NonPositiveTime, TraceMismatch
from .lp_core import DEFAULT_TOLERANCES, PivotRule, Status, Tolerances, check_certificate
from .partition import CPU_POOL, LaneSpec, split_theta

TIME_DIGITS = 6
RATIO_DIGITS = 4


def compute_speedup(t_base: float, t_p: float) -> float:
    if not (t_base > 0 and t_p > 0):
        raise NonPositiveTime(f"times must be positive, got {t_base} and {t_p}")
    return t_base / t_p


def compute_efficiency(speedup: float, p: int) -> float:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return speedup / p


@dataclass
class BenchRow:
    label: str
    p: int
    theta: float
    device_weights: tuple
    time_per_iter: float
    iterations: int
    speedup: float
    efficiency: float


@dataclass
class BenchReport:
    problem: str
    num_rows: int
    num_cols: int
    baseline_time_per_iter: float
    rows: list = field(default_factory=list)


def _timed_solve(problem, config, solver, reference_trace):
    solution, stats = solver(problem, config)
    trace = solution.trace_keys
    if reference_trace is not None and trace != reference_trace:
        raise TraceMismatch(f"configuration {config.label} changed the pivot trace "
                            f"(first {len(trace)} vs {len(reference_trace)} pivots)")
    if solution.status is Status.OPTIMAL:
        ok, violations = check_certificate(solution.standard, solution.tableau, config.tolerances)
        if not ok:
            raise CertificateError(f"{config.label}: {violations[:3]}")
    return solution, stats, trace


def run_bench(problem, lane_counts: Sequence[int] = (1, 2, 4, 8), repetitions: int = 3, *,
              pivot_rule: PivotRule = PivotRule.DANTZIG,
              tolerances: Tolerances = DEFAULT_TOLERANCES,
              max_iterations: Optional[int] = None, threaded: bool = True,
              solver: Callable = run_simplex, label: Optional[str] = None,
              warmup: bool = True) -> BenchReport:
    """Time the CPU-pool-only scheme for each worker count ``p``.

    An untimed warm-up solve runs first unless ``warmup`` is false.

    Every run must reproduce the first run's pivot trace, otherwise
    :class:`TraceMismatch` is raised before any timing is reported.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    counts = list(lane_counts)
    if 1 not in counts:
        counts = [1] + counts
    reference = None
    measured = {}
    if warmup:
        solver(problem, EngineConfig(cpu_workers=1, pivot_rule=pivot_rule, tolerances=tolerances,
                                     max_iterations=max_iterations, threaded=threaded))
    for p in counts:
        config = EngineConfig(lanes=(LaneSpec(0, CPU_POOL, 1.0),), cpu_workers=p, theta=0.0,
                              pivot_rule=pivot_rule, tolerances=tolerances,
                              max_iterations=max_iterations, threaded=threaded)
        times = []
        for _ in range(repetitions):
            solution, stats, trace = _timed_solve(problem, config, solver, reference)
            reference = trace if reference is None else reference
            times.append(stats.time_per_iteration)
        measured[p] = (statistics.median(times), solution.iterations)

    baseline = measured[1][0]
    report = BenchReport(label or getattr(problem, "name", "lp"),
                         problem.num_rows, problem.num_cols, baseline)
    for p in lane_counts:
        t, iterations = measured[p]
        sp = compute_speedup(baseline, t)
        report.rows.append(BenchRow(f"cpu:{p}", p, 0.0, (), t, iterations, sp,
                                    compute_efficiency(sp, p)))
    return report


def _fmt(value: float, digits: int) -> str:
    return f"{value:.{digits}f}"


def emit_csv(report: BenchReport) -> str:
    """CSV with columns label, p, theta, theta_1.., time_per_iter, iterations,
    speedup, efficiency.

    The efficiency cell is derived from the printed speedup so that the file
    is self-consistent: ``efficiency == round(speedup / p, 4)`` holds on the
    parsed values.
    """
    width = max((len(row.device_weights) for row in report.rows), default=0)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["label", "p", "theta"] + [f"theta_{i + 1}" for i in range(width)]
                    + ["time_per_iter", "iterations", "speedup", "efficiency"])
    for row in report.rows:
        weights = [_fmt(w, RATIO_DIGITS) for w in row.device_weights]
        weights += [""] * (width - len(weights))
        speedup = _fmt(row.speedup, RATIO_DIGITS)
        efficiency = _fmt(compute_efficiency(float(speedup), row.p), RATIO_DIGITS)
        writer.writerow([row.label, row.p, _fmt(row.theta, RATIO_DIGITS)] + weights
                        + [_fmt(row.time_per_iter, TIME_DIGITS), row.iterations, speedup, efficiency])
    return out.getvalue()


# ---------------------------------------------------------------------------
# theta sweep


def theta_grid(step: float) -> list:
    if not 0 < step <= 0.5:
        raise ValueError(f"theta step must lie in (0, 0.5], got {step}")
    count = int(round(1.0 / step))
    grid = [round(i * step, 10) for i in range(count + 1) if i * step <= 1.0 + 1e-9]
    grid[-1] = min(grid[-1], 1.0)
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


@dataclass
class SweepRow:
    theta: float
    device_weights: tuple
    times: dict  # config label -> time per iteration
    iterations: int
    trace: tuple = field(repr=False, default=())


@dataclass
class SweepReport:
    problem: str
    configs: list  # labels in column order
    rows: list = field(default_factory=list)

    def best_theta(self, config: Optional[str] = None) -> float:
        """Theta with the smallest time for ``config`` (default: first column).
        Ties go to the smaller theta."""
        config = config or self.configs[0]
        best = min(self.rows, key=lambda row: (row.times[config], row.theta))
        return best.theta

    @property
    def best(self) -> dict:
        return {label: self.best_theta(label) for label in self.configs}


def run_theta_sweep(problem, lanes: Sequence[LaneSpec], theta_step: float = 0.1, *,
                    cpu_workers: Sequence[int] | int = 1, repetitions: int = 1,
                    pivot_rule: PivotRule = PivotRule.DANTZIG,
                    tolerances: Tolerances = DEFAULT_TOLERANCES,
                    max_iterations: Optional[int] = None, threaded: bool = True,
                    solver: Callable = run_simplex, label: Optional[str] = None,
                    warmup: bool = True) -> SweepReport:
    """Solve once per theta in ``{0, step, ..., 1}`` for each CPU worker count.

    Every run must reproduce the pivot trace of the first one.
    """
    devices = list(lanes[1:])
    if not devices:
        raise ValueError("a theta sweep needs at least one device lane")
    workers = [cpu_workers] if isinstance(cpu_workers, int) else list(cpu_workers)
    capabilities = [d.capability for d in devices]
    report = SweepReport(label or getattr(problem, "name", "lp"), [f"cpu:{w}" for w in workers])
    reference = None
    if warmup:
        solver(problem, EngineConfig(lanes=tuple(lanes), cpu_workers=workers[0], theta=0.0,
                                     pivot_rule=pivot_rule, tolerances=tolerances,
                                     max_iterations=max_iterations, threaded=threaded))
    for theta in theta_grid(theta_step):
        weights = split_theta(theta, capabilities)
        times, iterations, trace = {}, 0, ()
        for w in workers:
            config = EngineConfig(lanes=tuple(lanes), cpu_workers=w, theta=theta,
                                  pivot_rule=pivot_rule, tolerances=tolerances,
                                  max_iterations=max_iterations, threaded=threaded)
            samples = []
            for _ in range(repetitions):
                solution, stats, trace = _timed_solve(problem, config, solver, reference)
                reference = trace if reference is None else reference
                samples.append(stats.time_per_iteration)
            times[f"cpu:{w}"] = statistics.median(samples)
            iterations = solution.iterations
        report.rows.append(SweepRow(theta, weights, times, iterations, trace))
    return report


def emit_sweep_csv(report: SweepReport) -> str:
    width = max((len(row.device_weights) for row in report.rows), default=0)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["theta"] + [f"theta_{i + 1}" for i in range(width)]
                    + [f"time_{label}" for label in report.configs])
    for row in report.rows:
        writer.writerow([_fmt(row.theta, RATIO_DIGITS)] + [_fmt(w, RATIO_DIGITS) for w in row.device_weights]
                        + [_fmt(row.times[label], TIME_DIGITS) for label in report.configs])
    return out.getvalue()
