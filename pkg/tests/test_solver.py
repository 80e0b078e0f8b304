import math

import numpy as np
import pytest

from pml import (
    AssignmentSpec,
    InfeasibleError,
    SolverConfig,
    default_delta,
    initial_point,
    is_feasible,
    iter_feasible,
    lmo,
    log_weight_relaxed,
    solve,
)
from conftest import tiny_solver_specs


def test_lmo_zero_gradient_returns_feasible():
    spec = AssignmentSpec(levels=[0.25, 0.5], freqs=[0, 1, 2], col_counts=[1, 1])
    S = lmo(np.zeros(spec.shape), spec)
    assert is_feasible(S, spec)


def test_lmo_prefers_larger_gradient_row():
    spec = AssignmentSpec(levels=[0.25, 0.5], freqs=[0, 1], col_counts=[1])
    G = np.array([[0.0, 3.0], [0.0, 1.0]])
    S = lmo(G, spec)
    assert S[0, 1] == pytest.approx(1.0)
    assert S[1, 1] == pytest.approx(0.0)


def test_lmo_spends_budget_on_unseen():
    spec = AssignmentSpec(levels=[0.25, 0.5], freqs=[0, 1], col_counts=[0])
    G = np.zeros((2, 2))
    G[0, 0] = 2.0
    S = lmo(G, spec)
    assert S[0, 0] == pytest.approx(1 / 0.25)
    assert (G * S).sum() == pytest.approx(2.0 / 0.25)


def test_lmo_outputs_are_near_vertices(rng):
    # Basic solutions: beyond one placement per observed column, at most one
    # extra nonzero per binding budget constraint.
    for spec in tiny_solver_specs():
        for _ in range(5):
            G = rng.normal(size=spec.shape)
            S = lmo(G, spec)
            assert is_feasible(S, spec)
            observed = S[:, 1:]
            extra = sum(
                max(0, int((observed[:, j] > 1e-9).sum()) - 1)
                for j in range(observed.shape[1])
                if spec.col_counts[j] > 0
            )
            assert extra <= spec.dim


def test_initial_point_examples():
    # Empty observed columns: the zero matrix.
    empty = AssignmentSpec(levels=[0.25, 0.5], freqs=[0, 1], col_counts=[0])
    assert np.array_equal(initial_point(empty), np.zeros((2, 2)))

    # Two elements of frequency 1 at n' = 2: both sit on the 0.5 row, budget 1.
    spec = AssignmentSpec(levels=[0.25, 0.5, 1.0], freqs=[0, 1], col_counts=[2])
    X = initial_point(spec)
    assert X[1, 1] == pytest.approx(2.0)
    assert spec.budget_use(X)[0] == pytest.approx(1.0)

    # Overshooting start rebalances exactly onto the budget.
    crowded = AssignmentSpec(levels=[0.125, 0.5, 1.0], freqs=[0, 3, 4], col_counts=[2, 1])
    X2 = initial_point(crowded)
    assert is_feasible(X2, crowded)
    assert crowded.budget_use(X2)[0] == pytest.approx(1.0)


def test_initial_point_infeasible():
    spec = AssignmentSpec(levels=[0.5, 1.0], freqs=[0, 1], col_counts=[5])
    with pytest.raises(InfeasibleError):
        initial_point(spec)


def test_solve_certifies_and_dominates_integral_max():
    for spec in tiny_solver_specs()[:10]:
        delta = 1e-6 * max(float(spec.disc_lengths.max()) * math.log(max(float(spec.disc_lengths.max()), 2.0)), 1.0)
        result = solve(spec, SolverConfig(delta=delta, max_iters=300))
        assert is_feasible(result.X, spec, tol=1e-9)
        best = max(
            log_weight_relaxed(X.astype(float), spec)
            for X in iter_feasible(spec, cap=500_000)
        )
        assert result.objective >= best - delta
        assert result.certified
        assert result.certified_gap <= delta


def test_solve_point_mass_profile_hits_hand_built_point():
    # Single element with full frequency: the top level alone is feasible.
    spec = AssignmentSpec(levels=[0.25, 0.5, 1.0], freqs=[0, 4], col_counts=[1])
    hand = np.zeros((3, 2))
    hand[2, 1] = 1.0
    result = solve(spec, SolverConfig(delta=1e-7))
    assert result.objective >= log_weight_relaxed(hand, spec) - 1e-7


def test_solve_deterministic():
    spec = tiny_solver_specs()[2]
    a = solve(spec, SolverConfig(delta=1e-6, max_iters=120))
    b = solve(spec, SolverConfig(delta=1e-6, max_iters=120))
    assert np.array_equal(a.X, b.X)
    assert a.objective == b.objective
    assert a.certified_gap == b.certified_gap


def test_default_delta_scales_with_length():
    spec = AssignmentSpec(levels=[0.5], freqs=[0, 1], col_counts=[2])
    assert default_delta(spec) == pytest.approx(1e-6 * 2 * math.log(2))
    tiny = AssignmentSpec(levels=[1.0], freqs=[0, 1], col_counts=[1])
    assert default_delta(tiny) == pytest.approx(1e-6)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(delta=0.0)
    with pytest.raises(ValueError):
        SolverConfig(delta=1e-6, max_iters=0)
