import csv
import io
import itertools

import pytest

from hybrid_simplex import EngineConfig, run_simplex
from hybrid_simplex.bench import (
    BenchReport,
    BenchRow,
    compute_efficiency,
    compute_speedup,
    emit_csv,
    emit_sweep_csv,
    run_bench,
    run_theta_sweep,
    theta_grid,
)
from hybrid_simplex.errors import NonPositiveTime, TraceMismatch
from hybrid_simplex.generator import GenSpec, generate_dense
from hybrid_simplex.partition import CPU_POOL, DEVICE, LaneSpec

LANES = (LaneSpec(0, CPU_POOL), LaneSpec(1, DEVICE, 0.45), LaneSpec(2, DEVICE, 0.55))


@pytest.fixture(scope="module")
def small():
    return generate_dense(GenSpec(20, 25, seed=3))


def scripted_solver(times):
    """Real solves whose reported time per iteration is replaced by ``times``."""
    feed = iter(times)

    def solver(problem, config):
        solution, stats = run_simplex(problem, config)
        value = next(feed)
        stats.loop_seconds = value * stats.iterations
        return solution, stats

    return solver


# -- arithmetic


def test_speedup_examples():
    assert compute_speedup(10.0, 2.5) == 4.0
    assert round(compute_speedup(3.1751, 0.2044), 2) == 15.53
    assert compute_speedup(0.7, 0.7) == 1.0
    with pytest.raises(NonPositiveTime):
        compute_speedup(0.0, 1.0)
    with pytest.raises(NonPositiveTime):
        compute_speedup(1.0, -1.0)


def test_efficiency_examples():
    assert f"{compute_efficiency(30.09, 32):.2%}" == "94.03%"
    assert f"{compute_efficiency(24.75, 32):.2%}" == "77.34%"
    assert compute_efficiency(8, 8) == 1.0
    with pytest.raises(ValueError):
        compute_efficiency(1.0, 0)


# -- run_bench


def test_bench_500_one_and_four_lanes():
    problem = generate_dense(GenSpec(500, 500, seed=1))
    report = run_bench(problem, [1, 4], repetitions=1)
    assert [row.p for row in report.rows] == [1, 4]
    assert report.rows[0].speedup == 1.0
    assert report.rows[0].iterations == report.rows[1].iterations
    one, _ = run_simplex(problem, EngineConfig(cpu_workers=1))
    four, _ = run_simplex(problem, EngineConfig(cpu_workers=4, threaded=True))
    assert one.trace_keys == four.trace_keys
    assert one.objective == four.objective
    for row in report.rows:
        assert row.speedup * row.time_per_iter == pytest.approx(report.baseline_time_per_iter, rel=1e-9)
        assert row.efficiency * row.p == pytest.approx(row.speedup, rel=1e-12)


def test_bench_reports_median(small):
    # baseline reps 4, 1, 2 -> median 2; p=2 reps 9, 1, 3 -> median 3
    solver = scripted_solver([4.0, 1.0, 2.0, 9.0, 1.0, 3.0])
    report = run_bench(small, [1, 2], repetitions=3, solver=solver, warmup=False)
    assert report.baseline_time_per_iter == 2.0
    assert [row.time_per_iter for row in report.rows] == [2.0, 3.0]
    assert report.rows[1].speedup == pytest.approx(2.0 / 3.0)


def test_bench_adds_missing_baseline(small):
    report = run_bench(small, [3], repetitions=1, solver=scripted_solver([2.0, 1.0]), warmup=False)
    assert [row.p for row in report.rows] == [3]
    assert report.rows[0].speedup == 2.0


def test_bench_detects_trace_mismatch(small):
    calls = itertools.count()

    def tampering(problem, config):
        solution, stats = run_simplex(problem, config)
        if next(calls) == 1:
            solution.pivot_trace = solution.pivot_trace[:-1]
        return solution, stats

    with pytest.raises(TraceMismatch):
        run_bench(small, [1, 2], repetitions=1, solver=tampering, warmup=False)


def test_bench_rejects_zero_reps(small):
    with pytest.raises(ValueError):
        run_bench(small, [1], repetitions=0)


# -- CSV


def make_report(rows):
    return BenchReport("x", 3, 4, 1.0, rows)


def test_emit_csv_empty_is_header_only():
    text = emit_csv(make_report([]))
    assert text == "label,p,theta,time_per_iter,iterations,speedup,efficiency\n"


def test_emit_csv_two_rows():
    rows = [BenchRow("cpu:1", 1, 0.0, (), 1.0, 10, 1.0, 1.0),
            BenchRow("cpu:4", 4, 0.0, (), 0.3, 10, 1 / 0.3, 1 / 1.2)]
    lines = emit_csv(make_report(rows)).splitlines()
    assert len(lines) == 3
    assert lines[2] == "cpu:4,4,0.0000,0.300000,10,3.3333,0.8333"


def test_emit_csv_with_device_weights():
    rows = [BenchRow("mix", 3, 0.8, (0.36, 0.44), 0.5, 7, 2.0, 2 / 3)]
    header, line = emit_csv(make_report(rows)).splitlines()
    assert header.split(",")[3:5] == ["theta_1", "theta_2"]
    assert line.split(",")[2:5] == ["0.8000", "0.3600", "0.4400"]


def test_emit_csv_round_trip_efficiency(small):
    report = run_bench(small, [1, 2, 3, 7], repetitions=2, solver=scripted_solver(
        [1.0, 1.0, 0.61, 0.59, 0.37, 0.41, 0.19, 0.23]), warmup=False)
    for record in csv.DictReader(io.StringIO(emit_csv(report))):
        sp, p, ep = float(record["speedup"]), int(record["p"]), float(record["efficiency"])
        assert f"{compute_efficiency(sp, p):.4f}" == record["efficiency"]
        assert ep == round(sp / p, 4)


# -- theta sweep


def test_theta_grid():
    assert theta_grid(0.1) == [round(0.1 * i, 1) for i in range(11)]
    assert theta_grid(0.5) == [0.0, 0.5, 1.0]
    assert theta_grid(0.3) == [0.0, 0.3, 0.6, 0.9, 1.0]
    for bad in (0.0, 0.6, -0.1):
        with pytest.raises(ValueError):
            theta_grid(bad)


def test_sweep_step_point_one(small):
    report = run_theta_sweep(small, LANES, 0.1, cpu_workers=[1, 2], warmup=False)
    assert [row.theta for row in report.rows] == theta_grid(0.1)
    assert report.configs == ["cpu:1", "cpu:2"]
    last = report.rows[-1]
    assert tuple(round(w, 3) for w in last.device_weights) == (0.450, 0.550)
    assert tuple(round(w, 3) for w in report.rows[8].device_weights) == (0.360, 0.440)
    assert len({row.trace for row in report.rows}) == 1
    text = emit_sweep_csv(report)
    lines = text.splitlines()
    assert lines[0] == "theta,theta_1,theta_2,time_cpu:1,time_cpu:2"
    assert len(lines) == 12
    assert lines[-1].startswith("1.0000,0.4500,0.5500,")


def test_sweep_step_half(small):
    report = run_theta_sweep(small, LANES, 0.5, warmup=False)
    assert [row.theta for row in report.rows] == [0.0, 0.5, 1.0]


def test_sweep_boundary_rows_match_standalone_runs(small):
    report = run_theta_sweep(small, LANES, 0.5, warmup=False)
    cpu_only, _ = run_simplex(small, EngineConfig(lanes=LANES, theta=0.0))
    lanes_only, _ = run_simplex(small, EngineConfig(lanes=LANES, theta=1.0))
    assert report.rows[0].trace == cpu_only.trace_keys
    assert report.rows[-1].trace == lanes_only.trace_keys


def test_best_theta_is_argmin(small):
    times = [5.0, 4.0, 3.0, 2.5, 2.0, 1.5, 1.2, 1.1, 0.9, 1.3, 2.0]
    report = run_theta_sweep(small, LANES, 0.1, solver=scripted_solver(times), warmup=False)
    assert report.best_theta() == 0.8
    assert report.best == {"cpu:1": 0.8}


def test_best_theta_tie_goes_to_smaller_theta(small):
    report = run_theta_sweep(small, LANES, 0.5, solver=scripted_solver([2.0, 1.0, 1.0]), warmup=False)
    assert report.best_theta() == 0.5


def test_sweep_needs_device(small):
    with pytest.raises(ValueError):
        run_theta_sweep(small, LANES[:1], 0.5)


def test_sweep_propagates_trace_mismatch(small):
    calls = itertools.count()

    def tampering(problem, config):
        solution, stats = run_simplex(problem, config)
        if next(calls) == 2:
            solution.pivot_trace = list(reversed(solution.pivot_trace))
        return solution, stats

    with pytest.raises(TraceMismatch):
        run_theta_sweep(small, LANES, 0.5, solver=tampering, warmup=False)
