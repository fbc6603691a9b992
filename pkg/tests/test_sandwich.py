from __future__ import annotations

import itertools

import numpy as np
import pytest

from rdl.errors import InvalidBin, OutOfRange
from rdl.partition import QuantileProfile
from rdl.random_instances import random_profile
from rdl.robust import robust_ratio, solve_gamma_star
from rdl.sandwich import (
    sandwich_bin_ratio,
    sandwich_bin_sup,
    sandwich_optimize,
    sandwich_ratio,
    sup_over_c,
)


def ratio_by_hand(q, r, c):
    nxt = q[r + 1] if r + 1 < len(q) else 1.0
    num = c * q[r - 1] + (c * (1 - c) + c) * (q[r] - q[r - 1]) + (1 + c) * (1 - q[r])
    den = c * q[r] + (nxt - q[r]) + (1 + c) * (1 - nxt)
    return num / den


def test_single_bin_is_two_minus_c():
    prof = QuantileProfile((0, 1))
    for c in (0.1, 0.5, 0.9, 1.0):
        assert sandwich_bin_ratio(prof, 1, c) == pytest.approx(2 - c)
    assert sandwich_bin_ratio(prof, 1, 0.0) == 2.0
    assert sandwich_ratio(prof) == pytest.approx(2.0)


def test_bin_ratio_matches_formula():
    rng = np.random.default_rng(0)
    for _ in range(200):
        prof = random_profile(rng, min_k=2)
        q = prof.thresholds
        r = int(rng.integers(1, prof.k + 1))
        c = float(rng.uniform(0.01, 1))
        if q[r] < 1:
            assert sandwich_bin_ratio(prof, r, c) == pytest.approx(ratio_by_hand(q, r, c))


def test_argument_errors():
    prof = QuantileProfile((0, 0.5, 1))
    with pytest.raises(InvalidBin):
        sandwich_bin_ratio(prof, 3, 0.5)
    with pytest.raises(OutOfRange):
        sandwich_bin_ratio(prof, 1, 1.5)


def test_closed_form_sup_matches_grid_search():
    rng = np.random.default_rng(1)
    for _ in range(200):
        prof = random_profile(rng, min_k=1)
        q = prof.thresholds
        for r in range(1, prof.k + 1):
            nxt = q[r + 1] if r < prof.k else 1.0
            exact = float(sup_over_c(q[r - 1], q[r], nxt))
            assert sandwich_bin_sup(prof, r) == pytest.approx(exact, abs=1e-9)


def test_last_bin_matches_tight_term():
    rng = np.random.default_rng(2)
    for _ in range(300):
        prof = random_profile(rng, min_k=2)
        last = robust_ratio(prof).per_bin[-1].term
        assert sandwich_bin_sup(prof, prof.k) == pytest.approx(last, abs=1e-9)
        assert sandwich_ratio(prof) >= last - 1e-9


def test_formula_can_fall_below_tight_ratio():
    # the bin formula comes from one family of instances, so on wide lower
    # bins it is weaker than the hinge-based term
    prof = QuantileProfile((0, 0.64, 0.68, 0.85, 1))
    assert sandwich_bin_sup(prof, 1) < robust_ratio(prof).per_bin[0].term - 0.01


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_optimum_is_looser_than_tight_optimum(k):
    assert sandwich_optimize(k).ratio > solve_gamma_star(k) + 0.05


def brute_force(k, step):
    grid = [i * step for i in range(round(1 / step) + 1)]
    best = np.inf
    for inner in itertools.combinations_with_replacement(grid, k - 1):
        q = (0.0, *inner, 1.0)
        val = max(
            float(sup_over_c(q[r - 1], q[r], q[r + 1] if r < k else 1.0)) for r in range(1, k + 1)
        )
        best = min(best, val)
    return best


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_dynamic_program_matches_enumeration(k):
    sol = sandwich_optimize(k, threshold_step=0.05)
    assert sol.profile.k == k
    assert sol.ratio == pytest.approx(brute_force(k, 0.05), abs=1e-8)


def test_table_examples():
    sol = sandwich_optimize(2)
    assert sol.ratio == pytest.approx(1.5, abs=1e-2)
    assert sol.profile.thresholds[1] == pytest.approx(0.667, abs=0.01)
    assert sandwich_optimize(3).ratio == pytest.approx(1.2658, abs=1e-2)
