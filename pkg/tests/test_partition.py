from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdl.dist import bernoulli, make_distribution, mixture, point_mass
from rdl.errors import InvariantViolation, ParseError
from rdl.partition import (
    QualityProfile,
    QuantileProfile,
    full_info_decomposition,
    no_info_decomposition,
    posterior_mean_distribution,
    preset,
    quality_decomposition,
    quantile_decomposition,
)
from rdl.random_instances import random_distribution, random_profile, random_quality_profile

UNIFORM3 = make_distribution([(0.0, 1 / 3), (0.5, 1 / 3), (1.0, 1 / 3)])

priors = st.lists(
    st.tuples(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.7, 1.0]) | st.floats(0, 1), st.floats(0.01, 1)),
    min_size=1,
    max_size=6,
).map(make_distribution)
profiles = st.lists(
    st.sampled_from([0.1, 0.25, 0.5, 0.75]) | st.floats(0, 1), max_size=5
).map(lambda xs: QuantileProfile((0.0, *sorted(xs), 1.0)))


def exact_quantile_bins(values, masses, thresholds):
    """Fraction-exact posterior masses: measure of quantile levels in each bin
    that map to each atom."""
    edges = [Fraction(0)]
    for m in masses:
        edges.append(edges[-1] + m)
    out = []
    for lo, hi in zip(thresholds, thresholds[1:]):
        bin_mass = {}
        for v, a, b in zip(values, edges, edges[1:]):
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                bin_mass[v] = overlap
        out.append((hi - lo, bin_mass))
    return out


def test_profile_invariants():
    with pytest.raises(InvariantViolation):
        QuantileProfile((0.0, 0.5, 0.4, 1.0))
    with pytest.raises(InvariantViolation):
        QuantileProfile((0.1, 1.0))
    with pytest.raises(InvariantViolation):
        QuantileProfile((0.0,))
    assert QuantileProfile((1e-13, 0.5, 1 - 1e-13)).thresholds == (0.0, 0.5, 1.0)
    with pytest.raises(InvariantViolation):
        QualityProfile((0.0, 0.5, 1.0), (0.0, 0.5, 0.5))


def test_presets():
    assert preset("uniform:4").thresholds == (0, 0.25, 0.5, 0.75, 1)
    assert preset("airbnb").thresholds == (0, 0.1, 0.9, 0.95, 0.99, 1)
    assert preset("upwork").thresholds == (0, 0.9, 0.97, 0.99, 1)
    with pytest.raises(ParseError):
        preset("ebay")


def test_uniform_three_atoms_four_bins():
    dec = quantile_decomposition(UNIFORM3, QuantileProfile.uniform(4))
    assert dec.weights == pytest.approx((0.25,) * 4)
    assert [p.mean() for p in dec.posteriors] == pytest.approx([0, 1 / 3, 2 / 3, 1])
    bin2 = dec.signals[1].posterior
    assert bin2.values == (0.0, 0.5)
    assert bin2.masses == pytest.approx((1 / 3, 2 / 3))  # 1/12 and 1/6 renormalized
    pm = posterior_mean_distribution(dec)
    assert pm.values == pytest.approx((0, 1 / 3, 2 / 3, 1))
    assert pm.masses == pytest.approx((0.25,) * 4)


def test_single_bin_is_no_information():
    dec = quantile_decomposition(UNIFORM3, QuantileProfile((0.0, 1.0)))
    assert len(dec) == 1
    post = dec.signals[0].posterior
    assert post.values == UNIFORM3.values
    assert post.masses == pytest.approx(UNIFORM3.masses, abs=1e-15)


def test_point_mass_prior_every_bin_degenerate():
    dec = quantile_decomposition(point_mass(0.4), QuantileProfile((0, 0.3, 0.6, 1)))
    assert all(p == point_mass(0.4) for p in dec.posteriors)


def test_zero_width_bins_dropped():
    dec = quantile_decomposition(UNIFORM3, QuantileProfile((0, 0.5, 0.5, 1)))
    assert [s.label for s in dec] == [1, 3]


def test_full_and_no_info():
    prior = bernoulli(0.5)
    full = full_info_decomposition(prior)
    assert full.weights == (0.5, 0.5)
    assert full.posteriors == (point_mass(0.0), point_mass(1.0))
    assert no_info_decomposition(prior).parts() == [(1.0, prior)]
    assert posterior_mean_distribution(full) == prior
    pm = posterior_mean_distribution(no_info_decomposition(bernoulli(0.70711)))
    assert pm.values == pytest.approx((0.70711,))
    assert full_info_decomposition(point_mass(0.3)).parts() == no_info_decomposition(point_mass(0.3)).parts()


def test_quality_decomposition_example():
    prof = QualityProfile((0, 0.25, 0.5, 0.75, 1), (0, 1, 1, 1, 1))
    dec = quality_decomposition(UNIFORM3, prof)
    assert [s.label for s in dec] == [1, 2, 4]
    assert dec.weights == pytest.approx((1 / 3,) * 3)
    assert dec.posteriors == (point_mass(0.0), point_mass(0.5), point_mass(1.0))


def test_quality_split_fraction():
    prior = make_distribution([(0.5, 1.0)])
    dec = quality_decomposition(prior, QualityProfile((0, 0.5, 1), (0, 0.3, 1)))
    assert dec.weights == pytest.approx((0.3, 0.7))
    assert [s.label for s in dec] == [1, 2]


def test_quality_atoms_on_thresholds_go_left_when_split_is_one():
    prior = make_distribution([(0.2, 0.5), (0.6, 0.5)])
    dec = quality_decomposition(prior, QualityProfile((0, 0.2, 0.6, 1), (0, 1, 1, 1)))
    assert [s.label for s in dec] == [1, 2]


def test_quality_coinciding_thresholds():
    prior = make_distribution([(0.5, 1.0)])
    dec = quality_decomposition(prior, QualityProfile((0, 0.5, 0.5, 1), (0, 0.4, 0.9, 1)))
    # first coinciding split sends 0.4 left; the rest skips the empty middle bin
    assert [(s.label, round(s.weight, 12)) for s in dec] == [(1, 0.4), (3, 0.6)]


def test_quality_point_mass_inside_interval():
    dec = quality_decomposition(point_mass(0.6), QualityProfile((0, 0.5, 1), (0, 0.5, 1)))
    assert len(dec) == 1 and dec.signals[0].label == 2


def test_quantile_decomposition_matches_exact_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        values = sorted(set(int(x) for x in rng.integers(0, 11, n)))
        masses = [Fraction(int(x), 1) for x in rng.integers(1, 6, len(values))]
        total = sum(masses)
        masses = [m / total for m in masses]
        k = int(rng.integers(1, 6))
        inner = sorted(Fraction(int(x), 12) for x in rng.integers(0, 13, k - 1))
        thresholds = [Fraction(0), *inner, Fraction(1)]
        prior = make_distribution((v / 10, float(m)) for v, m in zip(values, masses))
        dec = quantile_decomposition(prior, QuantileProfile(tuple(float(q) for q in thresholds)))
        expected = [(w, mm) for w, mm in exact_quantile_bins(values, masses, thresholds) if w > 0]
        assert len(dec) == len(expected)
        for sig, (w, mm) in zip(dec, expected):
            assert sig.weight == pytest.approx(float(w), abs=1e-12)
            total = sum(mm.values())
            assert sig.posterior.values == pytest.approx([v / 10 for v in mm])
            assert sig.posterior.masses == pytest.approx([float(x / total) for x in mm.values()], abs=1e-9)


def _assert_bayes_plausible(prior, dec):
    back = mixture(dec.parts())
    assert back.values == pytest.approx(prior.values, abs=1e-9)
    assert back.masses == pytest.approx(prior.masses, abs=1e-9)


@settings(max_examples=200)
@given(priors, profiles)
def test_quantile_properties(prior, profile):
    dec = quantile_decomposition(prior, profile)
    _assert_bayes_plausible(prior, dec)
    pm = posterior_mean_distribution(dec)
    assert pm.mean() == pytest.approx(prior.mean(), abs=1e-12)
    by_label = {s.label: s.weight for s in dec}
    for r, w in enumerate(profile.widths, start=1):
        assert by_label.get(r, 0.0) == pytest.approx(w, abs=1e-12)
    means = [p.mean() for p in dec.posteriors]
    assert all(a <= b + 1e-12 for a, b in zip(means, means[1:]))
    for a, b in zip(dec.posteriors, dec.posteriors[1:]):
        assert len(set(a.values) & set(b.values)) <= 1
        assert a.values[-1] <= b.values[0]


def test_quality_and_full_info_bayes_plausible():
    rng = np.random.default_rng(3)
    for _ in range(300):
        prior = random_distribution(rng)
        _assert_bayes_plausible(prior, quality_decomposition(prior, random_quality_profile(rng)))
        _assert_bayes_plausible(prior, full_info_decomposition(prior))
        _assert_bayes_plausible(prior, no_info_decomposition(prior))


def test_posterior_means_are_a_contraction():
    rng = np.random.default_rng(11)
    for _ in range(100):
        prior = random_distribution(rng)
        pm = posterior_mean_distribution(quantile_decomposition(prior, random_profile(rng)))
        for c in rng.random(100):
            assert pm.expect(lambda x: max(c, x)) <= prior.expect(lambda x: max(c, x)) + 1e-12
