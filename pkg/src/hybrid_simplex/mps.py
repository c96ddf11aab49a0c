"""Reader and writer for (fixed or free) MPS files.

Records are tokenized on whitespace, so fixed-format column positions are
ignored; names containing blanks are therefore not supported.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    ConflictingBounds,
    MalformedNumeric,
    MissingEndata,
    MpsError,
    UndeclaredRowOrColumn,
    UnknownSection,
)
from .lp_core import LpProblem, RawLp, Sense

SECTIONS = ("NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA")
RELATIONS = {"N": "N", "L": "L", "G": "G", "E": "E"}
VALUED_BOUNDS = {"LO", "UP", "FX"}
FLAG_BOUNDS = {"FR", "MI", "PL"}


@dataclass
class MpsModel:
    name: str = ""
    objective_row_name: Optional[str] = None
    rows: list = field(default_factory=list)  # (name, relation) with relation in L/G/E
    columns: list = field(default_factory=list)  # (col_name, row_name, coefficient)
    rhs: list = field(default_factory=list)  # (row_name, value)
    ranges: list = field(default_factory=list)  # (row_name, value)
    bounds: list = field(default_factory=list)  # (bound_type, col_name, value)
    column_names: list = field(default_factory=list)  # declaration order

    @property
    def num_constraints(self) -> int:
        return len(self.rows)

    @property
    def num_columns(self) -> int:
        return len(self.column_names)

    @property
    def shape(self) -> tuple:
        return self.num_constraints, self.num_columns


def _number(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedNumeric(f"cannot parse {token!r} as a number", line_no) from None
    if value != value:
        raise MalformedNumeric(f"{token!r} is not a number", line_no)
    return value


def _pairs(tokens, line_no):
    if len(tokens) not in (2, 4):
        raise MpsError(f"expected 1 or 2 (name, value) pairs, got {tokens}", line_no)
    return [(tokens[i], _number(tokens[i + 1], line_no)) for i in range(0, len(tokens), 2)]


def parse_mps(text: str) -> MpsModel:
    model = MpsModel()
    declared_rows: dict = {}
    free_rows: set = set()
    col_index: dict = {}
    coefficients: dict = {}
    rhs_set = range_set = bound_set = None
    rhs_values: dict = {}
    range_values: dict = {}
    section = None
    order = -1
    seen_end = False

    def check_row(name, line_no):
        if name not in declared_rows and name not in free_rows and name != model.objective_row_name:
            raise UndeclaredRowOrColumn(f"undeclared row {name!r}", line_no)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        tokens = line.split()
        if not line[0].isspace():
            keyword = tokens[0].upper()
            if keyword not in SECTIONS:
                raise UnknownSection(f"unknown section {tokens[0]!r}", line_no)
            position = SECTIONS.index(keyword)
            if position <= order:
                raise UnknownSection(f"section {keyword} out of order", line_no)
            order, section = position, keyword
            if keyword == "NAME":
                model.name = tokens[1] if len(tokens) > 1 else ""
            elif keyword == "ENDATA":
                seen_end = True
                break
            continue

        if section == "ROWS":
            if len(tokens) != 2:
                raise MpsError(f"ROWS record needs 2 fields, got {tokens}", line_no)
            kind, name = tokens[0].upper(), tokens[1]
            if kind not in RELATIONS:
                raise MpsError(f"unknown row type {tokens[0]!r}", line_no)
            if name in declared_rows or name in free_rows or name == model.objective_row_name:
                raise MpsError(f"duplicate row {name!r}", line_no)
            if kind == "N":
                if model.objective_row_name is None:
                    model.objective_row_name = name
                else:
                    free_rows.add(name)  # extra free rows are dropped
            else:
                declared_rows[name] = len(model.rows)
                model.rows.append((name, kind))
        elif section == "COLUMNS":
            if "'MARKER'" in tokens:
                continue
            col, rest = tokens[0], tokens[1:]
            if col not in col_index:
                col_index[col] = len(model.column_names)
                model.column_names.append(col)
            for row, value in _pairs(rest, line_no):
                check_row(row, line_no)
                if row in free_rows:
                    continue
                key = (col, row)
                coefficients[key] = coefficients.get(key, 0.0) + value
        elif section in ("RHS", "RANGES"):
            if len(tokens) % 2:
                set_name, tokens = tokens[0], tokens[1:]
            else:
                set_name = ""
            if section == "RHS":
                rhs_set = set_name if rhs_set is None else rhs_set
                if set_name != rhs_set:
                    continue
                target = rhs_values
            else:
                range_set = set_name if range_set is None else range_set
                if set_name != range_set:
                    continue
                target = range_values
            for row, value in _pairs(tokens, line_no):
                check_row(row, line_no)
                if row in free_rows:
                    continue
                if section == "RANGES" and row == model.objective_row_name:
                    raise MpsError("RANGES entry on the objective row", line_no)
                target[row] = value
        elif section == "BOUNDS":
            kind = tokens[0].upper()
            if kind in VALUED_BOUNDS:
                if len(tokens) == 4:
                    set_name, col, value = tokens[1], tokens[2], _number(tokens[3], line_no)
                elif len(tokens) == 3:
                    set_name, col, value = "", tokens[1], _number(tokens[2], line_no)
                else:
                    raise MpsError(f"malformed bound record {tokens}", line_no)
            elif kind in FLAG_BOUNDS:
                if len(tokens) == 3:
                    set_name, col = tokens[1], tokens[2]
                elif len(tokens) == 2:
                    set_name, col = "", tokens[1]
                else:
                    raise MpsError(f"malformed bound record {tokens}", line_no)
                value = None
            else:
                raise MpsError(f"unsupported bound type {tokens[0]!r}", line_no)
            bound_set = set_name if bound_set is None else bound_set
            if set_name != bound_set:
                continue
            if col not in col_index:
                raise UndeclaredRowOrColumn(f"undeclared column {col!r}", line_no)
            model.bounds.append((kind, col, value))
        else:
            raise MpsError(f"data record outside a section: {line.strip()!r}", line_no)

    if not seen_end:
        warnings.warn("MPS input ended without ENDATA", MissingEndata, stacklevel=2)
    if model.objective_row_name is None:
        raise MpsError("no objective (N) row declared")

    model.columns = [(col, row, value) for (col, row), value in coefficients.items()]
    model.rhs = list(rhs_values.items())
    model.ranges = list(range_values.items())
    return model


def read_mps(source) -> MpsModel:
    """Parse an MPS file given as a path, or ``"-"`` for standard input."""
    if str(source) == "-":
        return parse_mps(sys.stdin.read())
    return parse_mps(Path(source).read_text())


def _range_interval(relation, rhs, r):
    if relation == "L":
        return rhs - abs(r), rhs
    if relation == "G":
        return rhs, rhs + abs(r)
    if r >= 0:
        return rhs, rhs + r
    return rhs + r, rhs


def to_raw_lp(model: MpsModel) -> RawLp:
    """Assemble a dense minimization :class:`RawLp` from a parsed model.

    Ranged rows become a ``>= lower`` row immediately followed by a
    ``<= upper`` row.  An objective-row RHS ``v`` contributes the constant
    ``-v``, following the usual MPS convention.
    """
    col_index = {name: j for j, name in enumerate(model.column_names)}
    row_index = {name: i for i, (name, _) in enumerate(model.rows)}
    m, n = model.num_constraints, model.num_columns
    A = np.zeros((m, n))
    c = np.zeros(n)
    for col, row, value in model.columns:
        if row == model.objective_row_name:
            c[col_index[col]] += value
        else:
            A[row_index[row], col_index[col]] += value
    b = np.zeros(m)
    constant = 0.0
    for row, value in model.rhs:
        if row == model.objective_row_name:
            constant = -value
        else:
            b[row_index[row]] = value

    ranges = {row: value for row, value in model.ranges}
    out_rows, relations, out_rhs = [], [], []
    for i, (name, relation) in enumerate(model.rows):
        if name in ranges:
            lo, hi = _range_interval(relation, b[i], ranges[name])
            out_rows += [A[i], A[i]]
            relations += ["G", "L"]
            out_rhs += [lo, hi]
        else:
            out_rows.append(A[i])
            relations.append(relation)
            out_rhs.append(b[i])

    lower, upper = np.zeros(n), np.full(n, np.inf)
    for kind, col, value in model.bounds:
        j = col_index[col]
        if kind == "UP":
            upper[j] = value
            if value < 0 and lower[j] == 0.0:
                lower[j] = -np.inf
        elif kind == "LO":
            lower[j] = value
        elif kind == "FX":
            lower[j] = upper[j] = value
        elif kind == "FR":
            lower[j], upper[j] = -np.inf, np.inf
        elif kind == "MI":
            lower[j] = -np.inf
    for j in np.flatnonzero(lower > upper):
        raise ConflictingBounds(f"column {model.column_names[j]!r}: lower {lower[j]} > upper {upper[j]}")

    matrix = np.vstack(out_rows) if out_rows else np.zeros((0, n))
    return RawLp(matrix, relations, np.asarray(out_rhs), c, lower, upper,
                 Sense.MINIMIZE, model.name or "mps", constant)


def write_mps(problem: LpProblem, name: Optional[str] = None) -> str:
    """Serialize a ``<=``-form problem.  Maximization costs are negated,
    since MPS without OBJSENSE means minimize."""
    costs = problem.costs if problem.sense is Sense.MINIMIZE else -problem.costs
    label = (name or problem.name or "LP").replace(" ", "_")
    lines = [f"NAME          {label}", "ROWS", " N  COST"]
    lines += [f" L  R{i + 1}" for i in range(problem.num_rows)]
    lines.append("COLUMNS")
    for j in range(problem.num_cols):
        cname = f"X{j + 1}"
        entries = np.flatnonzero(problem.matrix[:, j])
        if costs[j] != 0.0 or entries.size == 0:
            lines.append(f"    {cname}  COST  {float(costs[j])!r}")
        for i in entries:
            lines.append(f"    {cname}  R{i + 1}  {float(problem.matrix[i, j])!r}")
    lines.append("RHS")
    for i in np.flatnonzero(problem.rhs):
        lines.append(f"    RHS  R{i + 1}  {float(problem.rhs[i])!r}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
