"""Shared instance generators for the test suite (all seeded, all deterministic)."""

from __future__ import annotations

import numpy as np
import pytest

from pml import AssignmentSpec, Profile, profile_of_sequence


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_distribution(rng, support: int, min_prob: float = 0.06) -> np.ndarray:
    """Random distribution with every entry at least min_prob."""
    assert support * min_prob < 1.0
    p = min_prob + (1.0 - support * min_prob) * rng.dirichlet(np.ones(support))
    assert p.min() >= min_prob
    return p


def random_sequence(rng, n: int, alphabet: int) -> list[str]:
    symbols = [chr(ord("a") + i) for i in range(alphabet)]
    return [symbols[i] for i in rng.integers(0, alphabet, size=n)]


def random_profile(rng, n: int, alphabet: int) -> Profile:
    return profile_of_sequence(random_sequence(rng, n, alphabet))


def random_fractional_point(rng, spec: AssignmentSpec) -> np.ndarray:
    """Random point of the fractional feasible set (budget variant).

    Columns get Dirichlet splits of their counts; if the mass budget is
    exceeded, a fraction of every column moves to the cheapest level, which
    lands exactly on the binding budget.
    """
    R, J = spec.shape
    X = np.zeros((R, J))
    for j in range(1, J):
        count = spec.col_counts[j - 1]
        if count:
            X[:, j] = rng.dirichlet(np.ones(R)) * count
    cheapest = int(np.argmin(spec.levels.sum(axis=1)))
    use = spec.budget_use(X)
    if np.any(use > 1.0):
        floor_use = spec.col_counts.sum() * spec.levels[cheapest]
        alpha = max(
            (u - 1.0) / (u - f) for u, f in zip(use, floor_use) if u > 1.0
        )
        assert 0 < alpha <= 1.0
        moved = alpha * X[:, 1:].sum(axis=0)
        X[:, 1:] *= 1.0 - alpha
        X[cheapest, 1:] += moved
    # Spend part of the leftover budget on unseen elements at the cheapest level.
    slack = float((1.0 - spec.budget_use(X)).min())
    if slack > 0:
        X[cheapest, 0] += 0.5 * slack / float(spec.levels[cheapest].max())
    return X


def tiny_solver_specs() -> list[AssignmentSpec]:
    """Hand-built enumerable instances with num_levels * observed_cols <= 12."""
    specs = []

    def add(levels, freqs, counts):
        specs.append(
            AssignmentSpec(
                levels=np.asarray(levels, dtype=float),
                freqs=np.asarray(freqs, dtype=float),
                col_counts=np.asarray(counts, dtype=np.int64),
            )
        )

    ladder4 = [0.125, 0.25, 0.5, 1.0]
    ladder3 = [0.25, 0.5, 1.0]
    add(ladder4, [0, 1, 2], [2, 0])  # two singletons, n = 2
    add(ladder4, [0, 1, 2], [0, 1])  # one doubleton
    add(ladder4, [0, 1, 2], [1, 1])  # ababc-like mix at n = 3
    add(ladder4, [0, 1, 2], [3, 0])
    add(ladder4, [0, 1, 2], [2, 1])
    add(ladder3, [0, 1, 2, 3], [1, 1, 0])
    add(ladder3, [0, 1, 2, 3], [0, 0, 1])
    add(ladder3, [0, 1, 2, 3], [2, 0, 1])
    add(ladder3, [0, 1, 3, 4], [1, 0, 1])
    add([0.0625, 0.25, 1.0], [0, 1, 2], [2, 2])
    add([0.0625, 0.25, 1.0], [0, 1, 4], [3, 1])
    add([0.1, 0.3, 0.9], [0, 1, 2], [1, 1])  # non-commensurable levels
    add([0.2, 0.5], [0, 1, 2, 3], [1, 1, 1])
    add([0.11, 0.47], [0, 1, 2, 5], [2, 1, 0])
    add(ladder4, [0, 1, 3], [1, 2])
    add(ladder3, [0, 2, 3], [2, 1])
    add([0.5, 1.0], [0, 1], [2])
    add([1 / 3, 2 / 3, 1.0], [0, 1, 2], [2, 1])
    add([0.125, 0.5], [0, 1, 2], [1, 2])
    add([0.0625, 0.125, 0.25, 0.5], [0, 1, 2], [4, 1])
    return specs


@pytest.fixture
def rng():
    return make_rng(20240817)
