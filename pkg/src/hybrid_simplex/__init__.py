"""Dense full-tableau simplex whose iterations are split over weighted compute lanes."""

from .bench import (
    BenchReport,
    compute_efficiency,
    compute_speedup,
    emit_csv,
    emit_sweep_csv,
    run_bench,
    run_theta_sweep,
)
from .engine import (
    EngineConfig,
    IterationStats,
    LocalCandidate,
    PivotRecord,
    merge_candidates,
    pivot_update,
    ratio_test,
    run_simplex,
    select_entering_local,
    solve_reference,
)
from .generator import GenSpec, generate_dense
from .lp_core import (
    DenseTableau,
    LpProblem,
    PivotRule,
    RawLp,
    Sense,
    Solution,
    Status,
    Tolerances,
    build_tableau,
    check_certificate,
    extract_solution,
    phase_one,
    standardize,
)
from .mps import MpsModel, parse_mps, read_mps, to_raw_lp, write_mps
from .partition import LaneSpec, PartitionPlan, parse_lane_spec, plan_partition, split_theta

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "build_tableau",
    "check_certificate",
    "compute_efficiency",
    "compute_speedup",
    "DenseTableau",
    "emit_csv",
    "emit_sweep_csv",
    "EngineConfig",
    "extract_solution",
    "generate_dense",
    "GenSpec",
    "IterationStats",
    "LaneSpec",
    "LocalCandidate",
    "LpProblem",
    "merge_candidates",
    "MpsModel",
    "parse_lane_spec",
    "parse_mps",
    "PartitionPlan",
    "phase_one",
    "pivot_update",
    "PivotRecord",
    "PivotRule",
    "plan_partition",
    "ratio_test",
    "RawLp",
    "read_mps",
    "run_bench",
    "run_simplex",
    "run_theta_sweep",
    "select_entering_local",
    "Sense",
    "Solution",
    "solve_reference",
    "split_theta",
    "standardize",
    "Status",
    "to_raw_lp",
    "Tolerances",
    "write_mps",
]
