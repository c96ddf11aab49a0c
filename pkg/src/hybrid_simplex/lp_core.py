"""Standard-form LP data and the dense full tableau with its Phase I.

Conventions used throughout the package:

* Internally every problem is ``maximize c.x  s.t.  A x <= b, x >= 0``.
* The tableau has ``m + 1`` rows and ``n + m + 1`` columns.  Row 0 is the
  objective row holding reduced costs (initially ``-c``), rows ``1..m`` are
  ``[A | I | b]``.  The last column is the right-hand side; its row-0 cell is
  the current objective value.
* Tableau cells are stored column-major (Fortran order) so that a contiguous
  range of columns is a contiguous block of memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    EmptyProblem,
    InconsistentBounds,
    InfeasibleProblem,
    IterationLimitReached,
    NumericalPivot,
    SimplexError,
)


class Sense(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Status(str, Enum):
    OPTIMAL = "Optimal"
    UNBOUNDED = "Unbounded"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"


class PivotRule(str, Enum):
    DANTZIG = "dantzig"
    BLAND = "bland"


@dataclass(frozen=True)
class Tolerances:
    optimality: float = 1e-7
    pivot: float = 1e-10
    feasibility: float = 1e-6
    phase_one: float = 1e-7
    unit_column: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()


def default_iteration_cap(num_rows: int, num_cols: int) -> int:
    return 20 * (num_rows + num_cols)


# ---------------------------------------------------------------------------
# problem types


@dataclass
class RawLp:
    """A general LP: rows with relations L/G/E and per-variable bounds.

    ``relations`` holds one of ``"L"``, ``"G"``, ``"E"`` per row.  Missing
    bounds default to ``[0, +inf)``.
    """

    matrix: np.ndarray
    relations: Sequence[str]
    rhs: np.ndarray
    costs: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    sense: Sense = Sense.MINIMIZE
    name: str = "lp"
    objective_constant: float = 0.0

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=np.float64))
        self.rhs = np.asarray(self.rhs, dtype=np.float64).reshape(-1)
        self.costs = np.asarray(self.costs, dtype=np.float64).reshape(-1)
        self.relations = [str(r).upper() for r in self.relations]
        self.sense = Sense(self.sense)
        m, n = self.matrix.shape
        if self.lower is None:
            self.lower = np.zeros(n)
        if self.upper is None:
            self.upper = np.full(n, np.inf)
        self.lower = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=np.float64).reshape(-1)
        if len(self.rhs) != m or len(self.relations) != m:
            raise ValueError("rhs and relations must have one entry per row")
        if len(self.costs) != n or len(self.lower) != n or len(self.upper) != n:
            raise ValueError("costs and bounds must have one entry per column")
        bad = set(self.relations) - {"L", "G", "E"}
        if bad:
            raise ValueError(f"unknown row relation(s) {sorted(bad)}")

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    def objective(self, x) -> float:
        return float(self.costs @ np.asarray(x, dtype=np.float64)) + self.objective_constant

    def is_feasible(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        ax = self.matrix @ x
        for value, rel, b in zip(ax, self.relations, self.rhs):
            if rel == "L" and value > b + tol:
                return False
            if rel == "G" and value < b - tol:
                return False
            if rel == "E" and abs(value - b) > tol:
                return False
        return True


@dataclass
class VariableMap:
    """How one original variable is expressed through standard-form columns.

    ``shift``:  x = x'[c0] + offset
    ``mirror``: x = offset - x'[c0]
    ``split``:  x = x'[c0] - x'[c1]
    """

    kind: str
    columns: tuple
    offset: float = 0.0


@dataclass
class StandardTransform:
    """Record of a standardize() call, used to map solutions back."""

    num_original: int
    variables: list
    sign: float = 1.0  # +1 if the original sense was maximize, -1 for minimize
    constant: float = 0.0  # f(x) = sign * z + constant

    @classmethod
    def identity(cls, n: int, sign: float = 1.0) -> "StandardTransform":
        return cls(n, [VariableMap("shift", (j,), 0.0) for j in range(n)], sign, 0.0)

    def recover(self, x_std) -> np.ndarray:
        x_std = np.asarray(x_std, dtype=np.float64)
        x = np.empty(self.num_original)
        for j, vm in enumerate(self.variables):
            if vm.kind == "shift":
                x[j] = x_std[vm.columns[0]] + vm.offset
            elif vm.kind == "mirror":
                x[j] = vm.offset - x_std[vm.columns[0]]
            else:
                x[j] = x_std[vm.columns[0]] - x_std[vm.columns[1]]
        return x

    def forward(self, x, num_std_cols: int) -> np.ndarray:
        """Image of an original point in standard-form variables."""
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(num_std_cols)
        for j, vm in enumerate(self.variables):
            if vm.kind == "shift":
                out[vm.columns[0]] = x[j] - vm.offset
            elif vm.kind == "mirror":
                out[vm.columns[0]] = vm.offset - x[j]
            else:
                out[vm.columns[0]] = max(x[j], 0.0)
                out[vm.columns[1]] = max(-x[j], 0.0)
        return out

    def objective(self, internal_value: float) -> float:
        return self.sign * internal_value + self.constant


@dataclass
class LpProblem:
    """``max/min c.x  s.t.  A x <= b, x >= 0`` with dense row-major ``A``."""

    matrix: np.ndarray
    rhs: np.ndarray
    costs: np.ndarray
    sense: Sense = Sense.MAXIMIZE
    name: str = "lp"
    transform: Optional[StandardTransform] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(np.atleast_2d(np.asarray(self.matrix, dtype=np.float64)))
        self.rhs = np.asarray(self.rhs, dtype=np.float64).reshape(-1)
        self.costs = np.asarray(self.costs, dtype=np.float64).reshape(-1)
        self.sense = Sense(self.sense)
        m, n = self.matrix.shape
        if len(self.rhs) != m:
            raise ValueError(f"rhs has length {len(self.rhs)}, expected {m}")
        if len(self.costs) != n:
            raise ValueError(f"costs has length {len(self.costs)}, expected {n}")
        for label, arr in (("matrix", self.matrix), ("rhs", self.rhs), ("costs", self.costs)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{label} contains non-finite entries")

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    def as_raw(self) -> RawLp:
        return RawLp(self.matrix, ["L"] * self.num_rows, self.rhs, self.costs,
                     sense=self.sense, name=self.name)


def standardize(problem) -> LpProblem:
    """Rewrite ``problem`` as an equivalent maximization with only ``<=`` rows.

    Accepts a :class:`RawLp` or an :class:`LpProblem`.  The returned problem
    carries a :class:`StandardTransform` in ``.transform``.
    """
    if isinstance(problem, LpProblem):
        problem = problem.as_raw()
    m, n = problem.matrix.shape
    if m == 0 or n == 0:
        raise EmptyProblem(f"problem {problem.name!r} has shape {m}x{n}")
    lower, upper = problem.lower, problem.upper
    bad = np.flatnonzero(lower > upper)
    if bad.size:
        j = int(bad[0])
        raise InconsistentBounds(f"variable {j}: lower {lower[j]} > upper {upper[j]}")

    A = problem.matrix
    rhs = problem.rhs.astype(np.float64).copy()
    cols, costs, variables, bound_rows = [], [], [], []
    constant = problem.objective_constant
    for j in range(n):
        lo, hi, a, c = lower[j], upper[j], A[:, j], problem.costs[j]
        if np.isfinite(lo):
            idx = len(cols)
            cols.append(a)
            costs.append(c)
            rhs -= a * lo
            constant += c * lo
            variables.append(VariableMap("shift", (idx,), float(lo)))
            if np.isfinite(hi):
                bound_rows.append((idx, hi - lo))
        elif np.isfinite(hi):
            idx = len(cols)
            cols.append(-a)
            costs.append(-c)
            rhs -= a * hi
            constant += c * hi
            variables.append(VariableMap("mirror", (idx,), float(hi)))
        else:
            idx = len(cols)
            cols.extend([a, -a])
            costs.extend([c, -c])
            variables.append(VariableMap("split", (idx, idx + 1)))

    A1 = np.column_stack(cols)
    n_std = A1.shape[1]
    rows, b = [], []
    for i, rel in enumerate(problem.relations):
        if rel in ("L", "E"):
            rows.append(A1[i])
            b.append(rhs[i])
        if rel in ("G", "E"):
            rows.append(-A1[i])
            b.append(-rhs[i])
    for idx, width in bound_rows:
        row = np.zeros(n_std)
        row[idx] = 1.0
        rows.append(row)
        b.append(width)

    sign = 1.0 if problem.sense is Sense.MAXIMIZE else -1.0
    transform = StandardTransform(n, variables, sign, constant)
    return LpProblem(np.vstack(rows), np.asarray(b), sign * np.asarray(costs, dtype=np.float64),
                     Sense.MAXIMIZE, problem.name, transform)


# ---------------------------------------------------------------------------
# tableau


@dataclass
class DenseTableau:
    cells: np.ndarray  # (m + 1, n + m + 1), Fortran order
    basis: np.ndarray  # basis[i] is the column basic in tableau row i + 1
    num_structural: int

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def num_constraints(self) -> int:
        return self.cells.shape[0] - 1

    @property
    def rhs_col(self) -> int:
        return self.cells.shape[1] - 1

    @property
    def objective_value(self) -> float:
        return float(self.cells[0, self.rhs_col])

    @property
    def needs_phase_one(self) -> bool:
        return bool(np.any(self.cells[1:, self.rhs_col] < 0.0))

    def copy(self) -> "DenseTableau":
        return DenseTableau(np.array(self.cells, order="F"), self.basis.copy(), self.num_structural)

    def basic_solution(self) -> np.ndarray:
        """Values of all non-rhs columns (structural then slack) at the current basis."""
        x = np.zeros(self.rhs_col)
        x[self.basis] = self.cells[1:, self.rhs_col]
        return x


def build_tableau(problem: LpProblem) -> DenseTableau:
    if problem.sense is not Sense.MAXIMIZE:
        raise ValueError("build_tableau expects a maximization problem; call standardize() first")
    m, n = problem.matrix.shape
    cells = np.zeros((m + 1, n + m + 1), order="F")
    cells[0, :n] = -problem.costs
    cells[1:, :n] = problem.matrix
    cells[1:, n:n + m] = np.eye(m)
    cells[1:, -1] = problem.rhs
    return DenseTableau(cells, np.arange(n, n + m), n)


def tableau_violations(tableau: DenseTableau, tol: Tolerances = DEFAULT_TOLERANCES,
                       check_feasible: bool = True) -> list:
    """Structural invariants: unit basis columns and (optionally) rhs >= -tol."""
    out = []
    T = tableau.cells
    for i, j in enumerate(tableau.basis):
        expected = np.zeros(tableau.rows)
        expected[i + 1] = 1.0
        err = np.max(np.abs(T[:, j] - expected))
        if err > tol.unit_column:
            out.append(f"basis column {j} (row {i + 1}) is not a unit vector (max error {err:.3g})")
    if check_feasible:
        rhs = T[1:, tableau.rhs_col]
        for i in np.flatnonzero(rhs < -tol.unit_column):
            out.append(f"rhs row {i + 1} is negative ({rhs[i]:.3g})")
    return out


# ---------------------------------------------------------------------------
# sequential pivoting (shared by Phase I and the reference solver)


def pivot_inplace(cells: np.ndarray, r: int, k: int, tol: float = 0.0) -> None:
    """Gauss-Jordan pivot on tableau cell ``(r, k)``; ``r`` is a tableau row."""
    p = cells[r, k]
    if not abs(p) > tol:
        raise NumericalPivot(f"pivot element {p!r} at ({r}, {k}) is below tolerance {tol}")
    row = cells[r, :] / p
    col = cells[:, k].copy()
    col[r] = 0.0
    cells -= np.outer(col, row)
    cells[r, :] = row


def choose_leaving(column: np.ndarray, rhs: np.ndarray, pivot_tol: float,
                   basis: Optional[np.ndarray] = None) -> Optional[int]:
    """Minimum ratio test; returns a 0-based constraint index or None.

    Ratio ties go to the lowest row, or to the lowest basic column index when
    ``basis`` is given (needed for Bland's anti-cycling guarantee).
    """
    mask = column > pivot_tol
    if not mask.any():
        return None
    ratios = np.full(column.shape[0], np.inf)
    ratios[mask] = np.maximum(rhs[mask], 0.0) / column[mask]
    tied = np.flatnonzero(ratios == ratios.min())
    if basis is None or tied.size == 1:
        return int(tied[0])
    return int(tied[np.argmin(basis[tied])])


def simplex_iterations(tableau: DenseTableau, *, rule: PivotRule = PivotRule.DANTZIG,
                       tol: Tolerances = DEFAULT_TOLERANCES, max_iterations: int,
                       entering_limit: Optional[int] = None,
                       on_pivot: Optional[Callable] = None):
    """Run the textbook loop in place until it stops.

    Returns ``(status, iterations)``.  ``on_pivot(tableau, k, r, pivot)`` is
    called after every pivot with ``r`` as a tableau row index.
    """
    rule = PivotRule(rule)
    T = tableau.cells
    rhs = tableau.rhs_col
    limit = rhs if entering_limit is None else entering_limit
    basis = tableau.basis
    it = 0
    while True:
        row0 = T[0, :limit]
        if rule is PivotRule.DANTZIG:
            k = int(np.argmin(row0))
            if not row0[k] < -tol.optimality:
                return Status.OPTIMAL, it
        else:
            negative = np.flatnonzero(row0 < -tol.optimality)
            if negative.size == 0:
                return Status.OPTIMAL, it
            k = int(negative[0])
        if it >= max_iterations:
            return Status.ITERATION_LIMIT, it
        r = choose_leaving(T[1:, k], T[1:, rhs], tol.pivot,
                           basis if rule is PivotRule.BLAND else None)
        if r is None:
            return Status.UNBOUNDED, it
        pivot = T[r + 1, k]
        pivot_inplace(T, r + 1, k, tol.pivot)
        basis[r] = k
        it += 1
        if on_pivot is not None:
            on_pivot(tableau, k, r + 1, pivot)


def phase_one(tableau: DenseTableau, *, rule: PivotRule = PivotRule.DANTZIG,
              tol: Tolerances = DEFAULT_TOLERANCES, max_iterations: Optional[int] = None):
    """Find a feasible basis with the two-phase method.

    Returns ``(tableau, iterations)``.  When the slack basis is already
    feasible the input object is returned untouched with zero iterations.
    Raises :class:`InfeasibleProblem` or :class:`IterationLimitReached`.
    """
    m = tableau.num_constraints
    rhs_col = tableau.rhs_col
    negative = np.flatnonzero(tableau.cells[1:, rhs_col] < 0.0)
    if negative.size == 0:
        return tableau, 0
    if max_iterations is None:
        max_iterations = default_iteration_cap(m, tableau.num_structural)

    width = rhs_col  # structural + slack columns
    n_art = negative.size
    aux = np.zeros((m + 1, width + n_art + 1), order="F")
    aux[:, :width] = tableau.cells[:, :width]
    aux[:, -1] = tableau.cells[:, rhs_col]
    basis = tableau.basis.copy()
    original_objective = tableau.cells[0, :width].copy()

    aux[0, :] = 0.0
    for a, i in enumerate(negative):
        aux[i + 1, :] *= -1.0
        aux[i + 1, width + a] = 1.0
        aux[0, width + a] = 1.0
        basis[i] = width + a
    for i in negative:
        aux[0, :] -= aux[i + 1, :]

    work = DenseTableau(aux, basis, tableau.num_structural)
    status, iterations = simplex_iterations(work, rule=rule, tol=tol, max_iterations=max_iterations)
    if status is Status.ITERATION_LIMIT:
        raise IterationLimitReached(f"Phase I hit the iteration cap ({max_iterations})")
    # the auxiliary objective is bounded below by construction
    residual = -work.objective_value
    if residual > tol.phase_one:
        raise InfeasibleProblem(f"auxiliary optimum {residual:.6g} > {tol.phase_one}", residual)

    # drive remaining (zero-level) artificials out of the basis
    for i in range(m):
        if basis[i] < width:
            continue
        row = np.abs(aux[i + 1, :width])
        j = int(np.argmax(row))
        if not row[j] > tol.pivot:
            raise SimplexError(f"row {i + 1} has no non-artificial pivot after Phase I")
        pivot_inplace(aux, i + 1, j, tol.pivot)
        basis[i] = j
        iterations += 1

    cells = np.zeros((m + 1, width + 1), order="F")
    cells[1:, :width] = aux[1:, :width]
    cells[1:, -1] = aux[1:, -1]
    cells[0, :width] = original_objective
    for i, j in enumerate(basis):
        factor = cells[0, j]
        if factor != 0.0:
            cells[0, :] -= factor * cells[i + 1, :]
    return DenseTableau(cells, basis, tableau.num_structural), iterations


# ---------------------------------------------------------------------------
# results


@dataclass
class Solution:
    status: Status
    objective: float
    primal: np.ndarray
    iterations: int = 0
    pivot_trace: list = field(default_factory=list)
    phase_one_iterations: int = 0
    tableau: Optional[DenseTableau] = field(default=None, repr=False, compare=False)
    standard: Optional[LpProblem] = field(default=None, repr=False, compare=False)

    @property
    def trace_keys(self) -> tuple:
        return tuple((p.entering_col, p.leaving_row) for p in self.pivot_trace)


def extract_solution(tableau: DenseTableau, transform: Optional[StandardTransform] = None,
                     *, iterations: int = 0, pivot_trace=None, status: Status = Status.OPTIMAL,
                     phase_one_iterations: int = 0, standard: Optional[LpProblem] = None) -> Solution:
    x_std = tableau.basic_solution()[:tableau.num_structural]
    z = tableau.objective_value
    if transform is None:
        primal, objective = x_std, z
    else:
        primal, objective = transform.recover(x_std), transform.objective(z)
    return Solution(Status(status), float(objective), primal, iterations,
                    list(pivot_trace or []), phase_one_iterations, tableau, standard)


def check_certificate(problem: LpProblem, tableau: DenseTableau,
                      tol: Tolerances = DEFAULT_TOLERANCES):
    """Independently verify an optimal tableau against the raw problem data.

    Returns ``(valid, violations)``.  Checks primal feasibility recomputed
    from ``A``/``b``, nonnegative reduced costs, the unit-basis invariant, and
    that the objective cell agrees with ``c.x``.
    """
    violations = []
    n = problem.num_cols
    if tableau.num_structural != n or tableau.num_constraints != problem.num_rows:
        return False, [f"tableau shape {tableau.cells.shape} does not match problem "
                       f"{problem.num_rows}x{n}"]
    x = tableau.basic_solution()[:n]
    for j in np.flatnonzero(x < -tol.unit_column):
        violations.append(f"x[{j}] = {x[j]:.3g} is negative")
    slack = problem.matrix @ x - problem.rhs
    for i in np.flatnonzero(slack > tol.feasibility):
        violations.append(f"row {i} violated by {slack[i]:.3g}")
    reduced = tableau.cells[0, :tableau.rhs_col]
    for j in np.flatnonzero(reduced < -tol.optimality):
        violations.append(f"objective-row entry in column {j} is {reduced[j]:.3g}")
    violations.extend(tableau_violations(tableau, tol, check_feasible=False))
    cx = float(problem.costs @ x)
    z = tableau.objective_value
    if abs(cx - z) > tol.feasibility * max(1.0, abs(cx)):
        violations.append(f"objective cell {z!r} disagrees with c.x = {cx!r}")
    return not violations, violations


