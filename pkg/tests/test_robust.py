from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from rdl import robust
from rdl.adversarial import lemma44_case1, lemma44_case2
from rdl.dist import bernoulli, make_distribution, point_mass
from rdl.errors import BracketFailure, NegativeInput, OutOfRange, RecursionInconsistency
from rdl.partition import QuantileProfile, preset
from rdl.random_instances import random_distribution, random_profile
from rdl.robust import (
    big_lambda,
    check_decreasing_margins,
    feasible_profile,
    hinge_ratio,
    lambda_step,
    optimal_profile,
    ratio_bounds,
    robust_ratio,
    solve_gamma_star,
    worst_hinge_ratio,
)


def test_lambda_step():
    assert lambda_step(0.0, 2.0) == 1.0
    assert lambda_step(0.0, 1.0) == 0.0
    assert lambda_step(1.0, 1.5) == 3.0
    with pytest.raises(NegativeInput):
        lambda_step(-0.1, 1.5)
    with pytest.raises(OutOfRange):
        lambda_step(0.1, 0.5)


def test_big_lambda():
    assert all(big_lambda(1.0, k) == 0.0 for k in range(1, 10))
    assert big_lambda(2.0, 1) == 1.0
    assert big_lambda(1.2956, 2) == pytest.approx(1.0, abs=5e-4)


def test_big_lambda_increasing_in_gamma():
    grid = np.linspace(1.001, 3.0, 500)
    for k in range(1, 11):
        vals = [big_lambda(g, k) for g in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_solve_gamma_star_examples():
    assert solve_gamma_star(1) == 2.0
    assert solve_gamma_star(3) == pytest.approx(1.1690, abs=5e-5)
    assert solve_gamma_star(5) == pytest.approx(1.0904, abs=5e-5)


def test_fixed_point_consistency():
    for k in range(1, 65):
        assert abs(big_lambda(solve_gamma_star(k), k) - 1.0) <= 1e-9


def test_bracket_failure(monkeypatch):
    monkeypatch.setattr(robust, "ratio_bounds", lambda k: (1.0, 1.0001))
    with pytest.raises(BracketFailure):
        solve_gamma_star(3)


def test_optimal_profile_examples():
    sol = optimal_profile(2)
    assert sol.profile.thresholds == pytest.approx((0, 0.7044, 1), abs=5e-5)
    assert sol.gamma_star == pytest.approx(1.2956, abs=5e-5)
    assert optimal_profile(1).profile.thresholds == (0.0, 1.0)
    sol = optimal_profile(4)
    assert sol.profile.thresholds == pytest.approx((0, 0.3772, 0.6695, 0.8822, 1), abs=5e-5)


def test_recursion_checks(monkeypatch):
    monkeypatch.setattr(robust, "solve_gamma_star", lambda k, tol=1e-12: 1.3)
    with pytest.raises(RecursionInconsistency):
        optimal_profile(2)
    true_gamma = solve_gamma_star(2)
    monkeypatch.setattr(robust, "solve_gamma_star", lambda k, tol=1e-12: true_gamma + 1e-8)
    with pytest.warns(RuntimeWarning):
        sol = optimal_profile(2)
    assert sol.profile.thresholds[0] == 0.0


def test_recursion_and_margins_at_optimum():
    for k in range(2, 30):
        sol = optimal_profile(k)
        q = sol.profile.thresholds
        for r in range(1, k + 1):
            assert q[r - 1] == pytest.approx(1 - lambda_step(1 - q[r], sol.gamma_star), abs=1e-10)
        assert all(a < b for a, b in zip(q, q[1:]))
        assert check_decreasing_margins(sol.profile)


def test_equalization():
    for k in range(1, 11):
        sol = optimal_profile(k)
        for t in robust_ratio(sol.profile).per_bin:
            assert t.term == pytest.approx(sol.gamma_star, abs=1e-8)


def test_robust_ratio_examples():
    rep = robust_ratio(QuantileProfile.uniform(4))
    assert rep.ratio == pytest.approx(1.25, abs=1e-12)
    assert robust_ratio(preset("upwork")).ratio == pytest.approx(1.5195, abs=5e-5)
    assert robust_ratio(QuantileProfile((0.0, 1.0))).ratio == 2.0
    rep = robust_ratio(QuantileProfile((0, 0.5, 0.5, 1)))
    assert rep.per_bin[1].term == 1.0


def test_report_invariants_and_tie_break():
    rng = np.random.default_rng(0)
    for _ in range(200):
        rep = robust_ratio(random_profile(rng, max_k=8))
        terms = [t.term for t in rep.per_bin]
        assert rep.ratio == max(terms)
        assert all(1.0 <= t <= 2.0 for t in terms)
        assert rep.argmax_bin == 1 + terms.index(max(terms))


def test_ratio_bounds():
    assert ratio_bounds(1) == (1.25, 2.0)
    assert ratio_bounds(4) == (1.0625, 1.25)
    assert ratio_bounds(100) == pytest.approx((1.0025, 1.01))
    for k in range(2, 101):
        lo, hi = ratio_bounds(k)
        assert lo < solve_gamma_star(k) < hi


def test_decreasing_margins_examples():
    assert check_decreasing_margins(optimal_profile(2).profile)
    assert not check_decreasing_margins(QuantileProfile.uniform(3))
    assert not check_decreasing_margins(QuantileProfile((0, 0.2, 1)))


def test_feasibility_equivalence():
    for k in range(1, 8):
        g = solve_gamma_star(k)
        prof = feasible_profile(g + 0.01, k)
        assert prof is not None and robust_ratio(prof).ratio <= g + 0.01 + 1e-12
        assert feasible_profile(g - 0.01, k) is None
    g = solve_gamma_star(2)
    grid = [i / 100 for i in range(101)]
    best = min(robust_ratio(QuantileProfile((0, q, 1))).ratio for q in grid)
    assert best > g - 0.01


# -- hinge ratios --------------------------------------------------------------


def test_hinge_ratio_examples():
    prior = bernoulli(0.5)
    assert hinge_ratio(prior, QuantileProfile((0, 1)), 0.5) == pytest.approx(1.5)
    assert hinge_ratio(prior, QuantileProfile((0, 0.5, 1)), 0.3) == pytest.approx(1.0)
    assert hinge_ratio(make_distribution([(0.2, 0.4), (0.9, 0.6)]), QuantileProfile.uniform(3), 1.0) == 1.0
    assert hinge_ratio(point_mass(0.0), QuantileProfile((0, 1)), 0.0) == 1.0


@pytest.mark.parametrize("m", [0.1, 0.3, 0.5, 0.8])
def test_worst_hinge_bernoulli_no_info(m):
    ratio, c = worst_hinge_ratio(bernoulli(m), QuantileProfile((0, 1)))
    assert ratio == pytest.approx(2 - m, abs=1e-12)
    assert c == pytest.approx(m, abs=1e-9)


def test_worst_hinge_case1_uniform():
    cert = lemma44_case1(QuantileProfile.uniform(2), 1)
    ratio, c = worst_hinge_ratio(cert.instance.prior, QuantileProfile.uniform(2))
    assert ratio == pytest.approx(1 + 0.5 / (1 + math.sqrt(0.5)) ** 2, abs=1e-9)
    assert c == pytest.approx(math.sqrt(2) - 1, abs=1e-6)


def test_worst_hinge_point_mass():
    assert worst_hinge_ratio(point_mass(0.4), QuantileProfile.uniform(3))[0] == pytest.approx(1.0)


def test_worst_hinge_matches_dense_grid():
    rng = np.random.default_rng(8)
    cs = np.linspace(0, 1, 2001)
    for _ in range(50):
        prior, prof = random_distribution(rng), random_profile(rng)
        ratio, c = worst_hinge_ratio(prior, prof)
        dense = max(hinge_ratio(prior, prof, float(x)) for x in cs)
        assert ratio >= dense - 1e-12
        assert ratio == pytest.approx(hinge_ratio(prior, prof, c), abs=1e-12)


def test_worst_hinge_below_robust_ratio():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        prior, prof = random_distribution(rng), random_profile(rng)
        assert worst_hinge_ratio(prior, prof)[0] <= robust_ratio(prof).ratio + 1e-9


def test_hinge_tightness_on_adversarial_priors():
    rng = np.random.default_rng(10)
    for _ in range(100):
        prof = random_profile(rng, max_k=6, min_k=2)
        rep = robust_ratio(prof)
        q = prof.thresholds
        for r in range(1, prof.k):
            if q[r] - q[r - 1] > 0 and q[r] < 1:
                prior = lemma44_case1(prof, r).instance.prior
                got = worst_hinge_ratio(prior, prof)[0]
                assert got >= rep.per_bin[r - 1].term - 1e-6
                assert got <= rep.ratio + 1e-9
        width = prof.widths[-1]
        if width > 0.2:
            last = rep.per_bin[-1].term
            gaps = [last - worst_hinge_ratio(lemma44_case2(prof, e).instance.prior, prof)[0] for e in (0.1, 0.01, 0.001)]
            assert gaps[-1] < gaps[0] and gaps[-1] <= 0.001 + 1e-9


def test_candidates_are_sorted_and_in_range():
    rng = np.random.default_rng(4)
    for _ in range(50):
        c = robust.hinge_candidates(random_distribution(rng), random_profile(rng))
        assert c == sorted(c) and 0.0 == c[0] and c[-1] == 1.0


def test_grid_profiles_never_beat_gamma_star():
    g = solve_gamma_star(3)
    grid = [i / 40 for i in range(41)]
    best = min(
        robust_ratio(QuantileProfile((0, a, b, 1))).ratio
        for a, b in itertools.combinations_with_replacement(grid, 2)
    )
    assert best >= g - 1e-12
