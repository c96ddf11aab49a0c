"""Seeded random dense LPs for benchmarking.

Random numbers come from numpy's Philox4x64 counter-based bit generator,
whose output stream is fixed by its algorithm and seed, so instances
reproduce bit-for-bit on every platform.  Draw order: ``A`` row-major, then
``b``, then ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp_core import LpProblem, Sense


@dataclass(frozen=True)
class GenSpec:
    rows: int
    cols: int
    seed: int = 0
    coeff_range: tuple = (1.0, 10.0)
    rhs_scale: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        low, high = self.coeff_range
        if not 0 < low < high:
            raise ValueError(f"coeff_range must satisfy 0 < low < high, got {self.coeff_range}")
        if not self.rhs_scale > 0:
            raise ValueError("rhs_scale must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @property
    def label(self) -> str:
        return f"dense{self.rows}x{self.cols}s{self.seed}"


def generate_dense(spec: GenSpec) -> LpProblem:
    """``max c.x  s.t.  A x <= b, x >= 0`` with every entry of ``A`` and ``c``
    in ``coeff_range`` and ``b`` in ``[rhs_scale * n, 2 * rhs_scale * n)``."""
    rng = np.random.Generator(np.random.Philox(spec.seed))
    low, high = spec.coeff_range
    m, n = spec.rows, spec.cols
    A = rng.uniform(low, high, size=(m, n))
    b = rng.uniform(spec.rhs_scale * n, 2.0 * spec.rhs_scale * n, size=m)
    c = rng.uniform(low, high, size=n)
    return LpProblem(A, b, c, Sense.MAXIMIZE, spec.label)
