import math

import numpy as np
import pytest

from pml import (
    GridSearchConfig,
    Profile,
    approximate_pml,
    brute_force_pml,
    entropy,
    levelset_profile_logprob,
    profile_of_sequence,
    support_size,
)


def output_logprob(dist, profile):
    return levelset_profile_logprob(
        dist.values, np.rint(dist.counts).astype(int), profile
    )


def test_point_mass_profile_gives_point_mass():
    profile = Profile(((4, 1),))
    dist, diag = approximate_pml(profile, eps1=1.0, eps2=1.0)
    assert len(dist) == 1
    assert dist.values[0] == pytest.approx(1.0, abs=1e-9)
    assert dist.total_mass == pytest.approx(1.0, abs=1e-12)
    assert output_logprob(dist, profile) >= -diag.slack_total - 1e-9
    assert support_size(dist) == 1


def test_two_singletons_matches_capped_brute_force():
    profile = Profile(((1, 2),))
    dist, diag = approximate_pml(profile, eps1=1.0, eps2=1.0)
    # P(out, [(1,2)]) = 1 - sum p^2 of the output.
    got = output_logprob(dist, profile)
    direct = math.log(1.0 - float((dist.values**2) @ dist.counts))
    assert got == pytest.approx(direct, abs=1e-9)
    _, bf = brute_force_pml(profile, GridSearchConfig(support_cap=8, resolution=8, n=2))
    assert got >= bf - diag.slack_total - 1e-9


def test_ababc_passes_bound_with_diagnostics():
    profile = profile_of_sequence("ababc")
    dist, diag = approximate_pml(profile, eps1=1.0, eps2=1.0)
    _, bf = brute_force_pml(profile)
    assert output_logprob(dist, profile) >= bf - diag.slack_total - 1e-9
    # The slack budget is the advertised sum of its parts.
    total = (
        diag.slack_prob_disc
        + 2 * diag.slack_freq_disc
        + diag.log_num_assignments
        + max(diag.solver_gap, 0.0)
        + diag.slack_relax_upper
        + diag.slack_relax_lower_rounded
        + diag.slack_round_count
    )
    assert diag.slack_total == pytest.approx(total)
    assert diag.n == (5,)
    assert diag.certified


def test_default_grid_coarseness():
    profile = profile_of_sequence("aabbccdd")
    _, diag = approximate_pml(profile)
    expected = 8 ** (-1 / 3)
    assert diag.eps1 == (pytest.approx(expected),)
    assert diag.eps2 == (pytest.approx(expected),)


def test_mass_and_entropy_of_output():
    profile = profile_of_sequence("abcabcxyz")
    dist, diag = approximate_pml(profile, eps1=0.5, eps2=0.5)
    assert dist.total_mass == pytest.approx(1.0, abs=1e-9)
    assert entropy(dist) > 0
    assert diag.mass_before_normalize[0] <= 1.0 + 1e-9


def test_single_assignment_term_lower_bounds_levelset_probability(rng):
    # P(levels of X, discretized profile) >= coeff * weight(X): one term of
    # the grouped sum never exceeds the whole sum.
    import pml
    from conftest import random_fractional_point, tiny_solver_specs

    for spec in tiny_solver_specs()[:6]:
        if spec.freqs.shape[1] != 1:
            continue
        rounded = pml.round_assignment(random_fractional_point(rng, spec), spec)
        rows = rounded.X.sum(axis=1)
        if not rows.any():
            continue
        pairs = [
            (int(f), int(c))
            for f, c in zip(spec.freqs[1:, 0], spec.col_counts)
            if c > 0
        ]
        disc_profile = Profile(tuple(pairs))
        whole = pml.levelset_profile_logprob(
            rounded.spec_ext.levels[rows > 0, 0], rows[rows > 0].astype(int), disc_profile
        )
        one_term = pml.log_profile_coefficient(disc_profile) + pml.log_weight(
            rounded.X, rounded.spec_ext
        )
        assert whole >= one_term - 1e-9


def test_normalization_never_decreases_profile_probability(rng):
    # P(q / |q|, profile) = |q|^-n P(q, profile) >= P(q, profile) for |q| <= 1.
    from pml import LevelSetDistribution, normalize
    from conftest import random_profile

    for _ in range(20):
        profile = random_profile(rng, int(rng.integers(1, 7)), 3)
        values = np.sort(rng.uniform(0.05, 0.3, size=2))[::-1]
        counts = rng.integers(1, 3, size=2)
        if values @ counts > 1:
            continue
        pseudo = LevelSetDistribution(values, counts)
        scaled = normalize(pseudo)
        before = levelset_profile_logprob(pseudo.values, counts, profile)
        after = levelset_profile_logprob(scaled.values, counts, profile)
        assert after >= before - 1e-12


def test_diagnostics_serialize():
    profile = profile_of_sequence("aab")
    _, diag = approximate_pml(profile, eps1=1.0, eps2=1.0)
    data = diag.to_dict()
    assert data["assignment_count_method"] in ("counted", "bound")
    assert data["slack_total"] == diag.slack_total
    assert isinstance(data["n"], tuple)
