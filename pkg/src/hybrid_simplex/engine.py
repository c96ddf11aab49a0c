"""Lane-parallel simplex iteration and the sequential reference solver.

One iteration of :func:`run_simplex` is five phases separated by barriers:

P1  every lane scans its own slice of the objective row for a local winner
P2  the local winners are merged into the entering column ``k``
P3  the lane owning column ``k`` runs the minimum ratio test, giving ``r``
P4  the owner normalizes the pivot row and publishes it, together with the
    pivot column, in a read-only staging buffer
P5  every lane applies the rank-one update to the columns it owns

Lane 0 is a CPU pool with ``cpu_workers`` execution contexts that splits P1
statically and P5 with dynamic chunking.  Each device lane is one context.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import InfeasibleProblem, IterationLimitReached, NumericalPivot, SimplexError
from .lp_core import (
    DEFAULT_TOLERANCES,
    DenseTableau,
    PivotRule,
    Solution,
    Status,
    Tolerances,
    build_tableau,
    default_iteration_cap,
    extract_solution,
    phase_one,
    simplex_iterations,
    standardize,
)
from .partition import CPU_POOL, LaneSpec, PartitionPlan, plan_partition, validate_lanes

log = logging.getLogger(__name__)

_observers: list = []


def add_observer(fn: Callable) -> Callable:
    """Register ``fn(solution)`` to be called for every finished solve.

    Returns a callable that removes the observer again.
    """
    _observers.append(fn)
    return lambda: _observers.remove(fn)


def _notify(solution: Solution) -> Solution:
    for fn in list(_observers):
        fn(solution)
    return solution


@dataclass(frozen=True)
class PivotRecord:
    iteration: int
    entering_col: int
    leaving_row: int  # tableau row, 1..m
    pivot_value: float
    owner_lane: int
    objective_after: float


@dataclass(frozen=True)
class LocalCandidate:
    lane_id: int
    local_best_col: Optional[int]
    local_best_value: float = 0.0


@dataclass
class EngineConfig:
    lanes: Sequence[LaneSpec] = (LaneSpec(0, CPU_POOL, 1.0),)
    cpu_workers: int = 1
    theta: float = 0.0
    pivot_rule: PivotRule = PivotRule.DANTZIG
    tolerances: Tolerances = DEFAULT_TOLERANCES
    max_iterations: Optional[int] = None
    trace: bool = True
    threaded: bool = False
    check_ownership: bool = False
    chunks_per_worker: int = 4

    def __post_init__(self):
        self.lanes = tuple(self.lanes)
        self.pivot_rule = PivotRule(self.pivot_rule)
        validate_lanes(self.lanes)
        if self.cpu_workers < 1 and self.theta < 1.0:
            raise ValueError("cpu_workers must be >= 1 when the CPU pool owns columns")

    @property
    def label(self) -> str:
        parts = [f"cpu:{self.cpu_workers}"] + [f"dev:{lane.capability:g}" for lane in self.lanes[1:]]
        return ",".join(parts) + f"@{self.theta:g}"


@dataclass
class IterationStats:
    iterations: int = 0
    phase_one_iterations: int = 0
    loop_seconds: float = 0.0
    iteration_seconds: list = field(default_factory=list)
    phase_seconds: dict = field(default_factory=lambda: dict.fromkeys(("P1", "P2", "P3", "P4", "P5"), 0.0))

    @property
    def time_per_iteration(self) -> float:
        return self.loop_seconds / self.iterations if self.iterations else 0.0


# ---------------------------------------------------------------------------
# per-phase operations


def select_entering_local(objective_row: np.ndarray, start: int, end: int, *, lane_id: int = 0,
                          rule: PivotRule = PivotRule.DANTZIG,
                          optimality_tol: float = DEFAULT_TOLERANCES.optimality) -> LocalCandidate:
    """Best entering candidate inside ``[start, end)`` of the objective row."""
    if end <= start:
        return LocalCandidate(lane_id, None)
    segment = np.ascontiguousarray(objective_row[start:end])
    scan = _kernels.first_negative if PivotRule(rule) is PivotRule.BLAND else _kernels.most_negative
    col, value = scan(segment, start, -optimality_tol)
    if col < 0:
        return LocalCandidate(lane_id, None)
    return LocalCandidate(lane_id, int(col), float(value))


def merge_candidates(candidates: Sequence[LocalCandidate],
                     rule: PivotRule = PivotRule.DANTZIG) -> Optional[int]:
    """Global entering column from per-lane winners, or None when optimal.

    Exact comparisons only: most negative value wins (Dantzig) or lowest
    column wins (Bland); value ties go to the lowest column.
    """
    present = [c for c in candidates if c.local_best_col is not None]
    if not present:
        return None
    if PivotRule(rule) is PivotRule.BLAND:
        return min(c.local_best_col for c in present)
    best = min(present, key=lambda c: (c.local_best_value, c.local_best_col))
    return best.local_best_col


def ratio_test(pivot_column: np.ndarray, rhs: np.ndarray,
               pivot_tol: float = DEFAULT_TOLERANCES.pivot,
               basis: Optional[np.ndarray] = None) -> Optional[int]:
    """Minimum ratio over entries above ``pivot_tol``; None means unbounded.

    Returns a 0-based index into ``pivot_column``.  Ties go to the lowest
    index, or to the lowest ``basis`` entry when ``basis`` is supplied.
    """
    best, best_ratio = None, np.inf
    for i in range(pivot_column.shape[0]):
        a = pivot_column[i]
        if a > pivot_tol:
            ratio = max(rhs[i], 0.0) / a
            if ratio < best_ratio:
                best, best_ratio = i, ratio
            elif ratio == best_ratio and basis is not None and basis[i] < basis[best]:
                best = i
    return best


def normalize_pivot_row(cells: np.ndarray, r: int, k: int, pivot_tol: float) -> np.ndarray:
    p = cells[r, k]
    if not abs(p) > pivot_tol:
        raise NumericalPivot(f"pivot element {p!r} at ({r}, {k}) is below tolerance {pivot_tol}")
    return cells[r, :] / p


def pivot_update(block: np.ndarray, pivot_row: np.ndarray, pivot_col: np.ndarray, r: int) -> None:
    """Eliminate within one lane's column block.

    ``pivot_row`` is the already normalized row ``r`` restricted to the
    block's columns; ``pivot_col`` is the full pivot column.
    """
    if block.shape[1] == 0:
        return
    if not block.flags.f_contiguous:
        raise ValueError("lane blocks must be Fortran-contiguous column slices")
    _kernels.rank_one_update(block, pivot_col, np.ascontiguousarray(pivot_row), r)


# ---------------------------------------------------------------------------
# lane pool


def _chunks(start: int, end: int, count: int):
    width = end - start
    if width <= 0:
        return []
    count = max(1, min(count, width))
    step, extra = divmod(width, count)
    out, pos = [], start
    for i in range(count):
        size = step + (1 if i < extra else 0)
        out.append((pos, pos + size))
        pos += size
    return out


class _LanePool:
    """Execution contexts for one solve.

    In single-context mode every task runs inline in lane order; otherwise
    the CPU pool gets ``cpu_workers`` threads and each device its own thread.
    Waiting on all futures of a phase is the barrier.
    """

    def __init__(self, plan: PartitionPlan, config: EngineConfig):
        self.plan = plan
        self.config = config
        self.cpu_range = plan.ranges[0]
        self.device_ranges = list(zip(plan.lane_ids[1:], plan.ranges[1:]))
        self.scan_chunks = _chunks(*self.cpu_range, config.cpu_workers)
        self.update_chunks = _chunks(*self.cpu_range, config.cpu_workers * config.chunks_per_worker)
        self._cpu = self._devices = None
        if config.threaded:
            self._cpu = ThreadPoolExecutor(max(1, config.cpu_workers), thread_name_prefix="cpu")
            self._devices = {lane_id: ThreadPoolExecutor(1, thread_name_prefix=f"dev{lane_id}")
                             for lane_id, _ in self.device_ranges}

    def close(self):
        if self._cpu is not None:
            self._cpu.shutdown()
            for ex in self._devices.values():
                ex.shutdown()

    def _run(self, tasks):
        """``tasks`` is a list of (lane_id, fn); returns results in task order."""
        if self._cpu is None:
            return [fn() for _, fn in tasks]
        futures = [(self._cpu if lane_id == 0 else self._devices[lane_id]).submit(fn)
                   for lane_id, fn in tasks]
        return [f.result() for f in futures]

    def on_lane(self, lane_id: int, fn):
        return self._run([(lane_id, fn)])[0]

    def local_candidates(self, row0: np.ndarray, rule: PivotRule, tol: float):
        def scan(lane_id, start, end):
            return lambda: select_entering_local(row0, start, end, lane_id=lane_id,
                                                 rule=rule, optimality_tol=tol)

        tasks = [(0, scan(0, s, e)) for s, e in self.scan_chunks]
        tasks += [(lane_id, scan(lane_id, s, e)) for lane_id, (s, e) in self.device_ranges]
        results = self._run(tasks)
        n_cpu = len(self.scan_chunks)
        cpu_col = merge_candidates(results[:n_cpu], rule)
        cpu = LocalCandidate(0, None)
        if cpu_col is not None:
            cpu = LocalCandidate(0, cpu_col, float(row0[cpu_col]))
        return [cpu] + results[n_cpu:]

    def update(self, cells: np.ndarray, row_norm: np.ndarray, col: np.ndarray, r: int,
               ownership: Optional[list]):
        rhs = cells.shape[1] - 1

        def work(start, end):
            def fn():
                pivot_update(cells[:, start:end], row_norm[start:end], col, r)
                return start, end
            return fn

        tasks = [(0, work(s, e)) for s, e in self.update_chunks]
        # the rhs column lives with the CPU pool
        tasks.append((0, work(rhs, rhs + 1)))
        tasks += [(lane_id, work(s, e)) for lane_id, (s, e) in self.device_ranges if e > s]
        touched = self._run(tasks)
        if ownership is not None:
            ownership.append([(lane_id, span) for (lane_id, _), span in zip(tasks, touched)])


def _check_ownership(plan: PartitionPlan, rhs_col: int, log_entry) -> None:
    spans = sorted(span for _, span in log_entry)
    for (s0, e0), (s1, e1) in zip(spans, spans[1:]):
        if s1 < e0:
            raise SimplexError(f"P5 blocks overlap: [{s0},{e0}) and [{s1},{e1})")
    for lane_id, (s, e) in log_entry:
        if (s, e) == (rhs_col, rhs_col + 1):
            if lane_id != 0:
                raise SimplexError("rhs column updated outside the CPU pool")
            continue
        lo, hi = plan.range_of(lane_id)
        if not (lo <= s and e <= hi):
            raise SimplexError(f"lane {lane_id} wrote [{s},{e}) outside its range [{lo},{hi})")


# ---------------------------------------------------------------------------
# solvers


def _prepare(problem, rule, tol, max_iterations):
    std = standardize(problem)
    tableau = build_tableau(std)
    cap = max_iterations if max_iterations is not None else default_iteration_cap(std.num_rows, std.num_cols)
    try:
        tableau, p1 = phase_one(tableau, rule=rule, tol=tol, max_iterations=cap)
    except InfeasibleProblem:
        return std, None, Status.INFEASIBLE, 0, cap
    except IterationLimitReached:
        return std, None, Status.ITERATION_LIMIT, cap, cap
    return std, tableau, None, p1, cap


def _early_exit(std, status, p1) -> Solution:
    nan = np.full(std.transform.num_original, np.nan)
    return Solution(status, float("nan"), nan, 0, [], p1, None, std)


def run_simplex(problem, config: Optional[EngineConfig] = None, *,
                on_pivot: Optional[Callable] = None):
    """Solve ``problem`` with the lane-partitioned iteration.

    Returns ``(Solution, IterationStats)``.  ``on_pivot(tableau, record)`` is
    invoked after each P5 barrier.
    """
    config = config or EngineConfig()
    tol = config.tolerances
    rule = config.pivot_rule
    stats = IterationStats()
    std, tableau, status, p1, cap = _prepare(problem, rule, tol, config.max_iterations)
    stats.phase_one_iterations = p1
    if tableau is None:
        return _notify(_early_exit(std, status, p1)), stats

    plan = plan_partition(tableau.rhs_col, config.theta, config.lanes)
    pool = _LanePool(plan, config)
    cells, basis = tableau.cells, tableau.basis
    rhs_col = tableau.rhs_col
    trace, ownership = [], ([] if config.check_ownership else None)
    phase = stats.phase_seconds
    clock = time.perf_counter
    it = 0
    loop_start = clock()
    try:
        while True:
            t0 = clock()
            row0 = np.ascontiguousarray(cells[0, :rhs_col])
            candidates = pool.local_candidates(row0, rule, tol.optimality)
            t1 = clock()
            k = merge_candidates(candidates, rule)
            t2 = clock()
            phase["P1"] += t1 - t0
            phase["P2"] += t2 - t1
            if k is None:
                status = Status.OPTIMAL
                break
            if it >= cap:
                status = Status.ITERATION_LIMIT
                break
            owner = plan.owner_of(k)
            r = pool.on_lane(owner, lambda: ratio_test(cells[1:, k], cells[1:, rhs_col], tol.pivot,
                                                       basis if rule is PivotRule.BLAND else None))
            t3 = clock()
            phase["P3"] += t3 - t2
            if r is None:
                status = Status.UNBOUNDED
                break
            r += 1
            pivot_value = float(cells[r, k])
            row_norm, col = pool.on_lane(owner, lambda: (normalize_pivot_row(cells, r, k, tol.pivot),
                                                         cells[:, k].copy()))
            row_norm.flags.writeable = False
            col.flags.writeable = False
            t4 = clock()
            phase["P4"] += t4 - t3
            pool.update(cells, row_norm, col, r, ownership)
            basis[r - 1] = k
            t5 = clock()
            phase["P5"] += t5 - t4
            if ownership is not None:
                _check_ownership(plan, rhs_col, ownership.pop())
            it += 1
            stats.iteration_seconds.append(t5 - t0)
            record = PivotRecord(it, k, r, pivot_value, owner, float(cells[0, rhs_col]))
            if config.trace:
                trace.append(record)
            if on_pivot is not None:
                on_pivot(tableau, record)
    finally:
        pool.close()
    stats.loop_seconds = clock() - loop_start
    stats.iterations = it
    solution = extract_solution(tableau, std.transform, iterations=it, pivot_trace=trace,
                                status=status, phase_one_iterations=p1, standard=std)
    if status is Status.UNBOUNDED:
        solution.objective = float("inf") if std.transform.sign > 0 else float("-inf")
    log.debug("run_simplex %s: %s after %d iterations", config.label, status.value, it)
    return _notify(solution), stats


def solve_reference(problem, pivot_rule: PivotRule = PivotRule.DANTZIG,
                    tolerances: Tolerances = DEFAULT_TOLERANCES, *,
                    max_iterations: Optional[int] = None,
                    on_pivot: Optional[Callable] = None) -> Solution:
    """Single-context textbook simplex with the same tie-break rules."""
    rule = PivotRule(pivot_rule)
    std, tableau, status, p1, cap = _prepare(problem, rule, tolerances, max_iterations)
    if tableau is None:
        return _notify(_early_exit(std, status, p1))
    trace = []

    def record(tab: DenseTableau, k, r, pivot):
        rec = PivotRecord(len(trace) + 1, k, r, float(pivot), 0, tab.objective_value)
        trace.append(rec)
        if on_pivot is not None:
            on_pivot(tab, rec)

    status, it = simplex_iterations(tableau, rule=rule, tol=tolerances, max_iterations=cap,
                                    on_pivot=record)
    solution = extract_solution(tableau, std.transform, iterations=it, pivot_trace=trace,
                                status=status, phase_one_iterations=p1, standard=std)
    if status is Status.UNBOUNDED:
        solution.objective = float("inf") if std.transform.sign > 0 else float("-inf")
    return _notify(solution)
