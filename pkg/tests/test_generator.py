import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybrid_simplex import Sense, Status, build_tableau, solve_reference
from hybrid_simplex.generator import GenSpec, generate_dense

from oracles import vertex_enumeration

# First instance of the Philox stream for seed 0, pinned so that a change of
# bit generator or draw order is caught.
FROZEN_A = [[1.1266033209908293, 3.3199052106215596, 5.244088429137607],
            [1.8227770399663183, 9.812210500588629, 3.3047551294240405]]
FROZEN_B = [5.8067783197710074, 3.570157904014188]
FROZEN_C = [1.3248196682732536, 1.5025743780180891, 8.03688490642059]


def test_same_spec_same_problem():
    a = generate_dense(GenSpec(20, 30, seed=123))
    b = generate_dense(GenSpec(20, 30, seed=123))
    np.testing.assert_array_equal(a.matrix, b.matrix)
    np.testing.assert_array_equal(a.rhs, b.rhs)
    np.testing.assert_array_equal(a.costs, b.costs)
    assert a.name == "dense20x30s123"


def test_different_seeds_differ():
    a = generate_dense(GenSpec(5, 5, seed=1))
    b = generate_dense(GenSpec(5, 5, seed=2))
    assert not np.array_equal(a.matrix, b.matrix)


def test_frozen_stream():
    p = generate_dense(GenSpec(2, 3, seed=0))
    assert p.matrix.tolist() == FROZEN_A
    assert p.rhs.tolist() == FROZEN_B
    assert p.costs.tolist() == FROZEN_C
    assert p.sense is Sense.MAXIMIZE


def test_ranges_and_slack_basis():
    spec = GenSpec(15, 25, seed=9, coeff_range=(2.0, 3.0), rhs_scale=0.5)
    p = generate_dense(spec)
    assert np.all((p.matrix >= 2.0) & (p.matrix < 3.0))
    assert np.all((p.costs >= 2.0) & (p.costs < 3.0))
    assert np.all((p.rhs >= 12.5) & (p.rhs < 25.0))
    assert not build_tableau(p).needs_phase_one


def test_six_by_six_seed_42_matches_enumeration():
    p = generate_dense(GenSpec(6, 6, seed=42))
    best = vertex_enumeration(p.matrix, p.rhs, p.costs)
    sol = solve_reference(p)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(best[0], abs=1e-6)


@pytest.mark.parametrize("kwargs", [
    dict(rows=0, cols=3), dict(rows=3, cols=0), dict(rows=2, cols=2, coeff_range=(0.0, 1.0)),
    dict(rows=2, cols=2, coeff_range=(3.0, 2.0)), dict(rows=2, cols=2, rhs_scale=0.0),
    dict(rows=2, cols=2, seed=-1), dict(rows=2, cols=2, seed=2**64),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        GenSpec(**kwargs)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**64 - 1))
def test_never_unbounded_or_infeasible(m, n, seed):
    sol = solve_reference(generate_dense(GenSpec(m, n, seed=seed)))
    assert sol.status is Status.OPTIMAL
    assert sol.objective > 0
