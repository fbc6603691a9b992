"""Explicit worst-case instances, each certified by recomputing its ratio.

Achieved ratios always go through the decomposition and revenue oracles;
closed forms only supply the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .dist import bernoulli, make_distribution
from .errors import CertificateMismatch, EpsilonTooLarge, InvalidBin, OutOfRange, ThresholdViolation
from .market import MarketInstance, NamedValuation, TabularValuation, opt_benchmark, revenue
from .partition import (
    QualityProfile,
    QuantileProfile,
    SignalDecomposition,
    quality_decomposition,
    quantile_decomposition,
)
from .robust import bin_term

CONSTRUCTIONS = ("Lemma44Case1", "Lemma44Case2", "QualityHard", "SingleCrossing")

Profile = Union[QuantileProfile, QualityProfile]


@dataclass(frozen=True)
class AdversarialCertificate:
    construction: str
    instance: MarketInstance
    profile: Profile
    target_ratio: float
    achieved_ratio: float
    params: dict = field(default_factory=dict)


def decompose(instance: MarketInstance, profile: Profile) -> SignalDecomposition:
    if isinstance(profile, QualityProfile):
        return quality_decomposition(instance.prior, profile)
    return quantile_decomposition(instance.prior, profile)


def achieved_ratio(instance: MarketInstance, profile: Profile) -> float:
    """Optimal revenue over revenue under ``profile``, both from the oracles."""
    return opt_benchmark(instance) / revenue(instance, decompose(instance, profile))


def _certify(construction, instance, profile, target, tol, params) -> AdversarialCertificate:
    got = achieved_ratio(instance, profile)
    if abs(got - target) > tol:
        raise CertificateMismatch(
            f"{construction}: achieved {got!r} but target is {target!r}"
        )
    return AdversarialCertificate(construction, instance, profile, target, got, params)


def lemma44_case1(profile: QuantileProfile, r: int) -> AdversarialCertificate:
    """Bernoulli prior and Bernoulli types attaining the bin-r term exactly (r < K)."""
    if not 1 <= r < profile.k:
        raise InvalidBin(f"bin {r} must lie in 1..{profile.k - 1}")
    lo, hi = profile.bin(r)
    if hi - lo <= 0.0 or hi >= 1.0:
        raise InvalidBin(f"bin {r} has zero width or ends at quantile 1")
    root = math.sqrt(1.0 - hi)
    s = root / (1.0 + root)
    omega_bar = (1.0 - hi) + (hi - lo) * s
    inst = MarketInstance(NamedValuation("hinge"), bernoulli(s), bernoulli(omega_bar))
    params = {"bin": r, "s": s, "omega_bar": omega_bar}
    return _certify("Lemma44Case1", inst, profile, bin_term(lo, hi), 1e-9, params)


def lemma44_case2(
    profile: QuantileProfile, eps: float, t: float = 0.5
) -> AdversarialCertificate:
    """Three-point prior concentrating the last bin; ratio ``1 + width_K - eps``."""
    width = 1.0 - profile.thresholds[-2]
    if eps <= 0.0:
        raise OutOfRange(f"eps = {eps!r} must be positive")
    if eps >= width:
        raise EpsilonTooLarge(f"eps = {eps!r} must be below the last bin width {width!r}")
    if not 0.0 < t < 1.0:
        raise OutOfRange(f"t = {t!r} outside (0, 1)")
    m_k = eps * (1.0 + t) / (2.0 * width)
    if m_k >= t:
        raise ThresholdViolation(f"last-bin mean {m_k!r} is not below t = {t!r}")
    prior = make_distribution([(0.0, 1.0 - eps), (t, eps / 2.0), (1.0, eps / 2.0)])
    inst = MarketInstance(NamedValuation("hinge"), bernoulli(m_k), prior)
    params = {"eps": eps, "t": t, "m_k": m_k}
    return _certify("Lemma44Case2", inst, profile, 1.0 + width - eps, 1e-12, params)


def quality_hard_instance(profile: QualityProfile, eps: float) -> AdversarialCertificate:
    """Two atoms below the first positive threshold, so the partition reveals nothing."""
    if not 0.0 < eps < 1.0:
        raise OutOfRange(f"eps = {eps!r} outside (0, 1)")
    j = next(r for r, w in enumerate(profile.thresholds) if w > 0.0)
    top = profile.thresholds[j]
    prior = make_distribution(
        [(eps * eps * top / 2.0, 1.0 / (1.0 + eps)), (top / 2.0, eps / (1.0 + eps))]
    )
    c = prior.mean()
    inst = MarketInstance(NamedValuation("hinge"), bernoulli(c), prior)
    params = {"eps": eps, "j": j, "c": c}
    return _certify("QualityHard", inst, profile, 2.0 / (1.0 + eps), 1e-9, params)


def single_crossing_instance() -> AdversarialCertificate:
    """Fixed 3x3 tabular market where no disclosure is far worse than a factor 2."""
    grid = (0.0, 0.5, 1.0)
    values = (
        (1.0, 0.0, 0.0),
        (1.0, 1.0, 1.0),
        (0.0, 0.0, 1.0),
    )
    valuation = TabularValuation(grid, grid, values)
    types = make_distribution(zip(grid, (5 / 6, 1 / 60, 3 / 20)))
    prior = make_distribution(zip(grid, (1 / 60, 53 / 60, 1 / 10)))
    inst = MarketInstance(valuation, types, prior)
    # the one-bin quantile profile is exactly the no-information scheme
    no_info = QuantileProfile((0.0, 1.0))
    return _certify("SingleCrossing", inst, no_info, 41 / 15, 1e-12, {})
