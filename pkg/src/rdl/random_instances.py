"""Seeded generators for the randomized property checks.

Values are snapped to a coarse grid part of the time so that atoms land on
thresholds and on each other, which is where routing bugs hide.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .dist import AtomicDistribution, make_distribution
from .market import AffineValuation, MarketInstance, NamedValuation, Valuation
from .partition import QualityProfile, QuantileProfile


def _points(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.random(n)
    if rng.random() < 0.4:
        x = np.round(x * 10.0) / 10.0
    return x


def random_distribution(rng: np.random.Generator, max_atoms: int = 6) -> AtomicDistribution:
    n = int(rng.integers(1, max_atoms + 1))
    masses = rng.dirichlet(np.ones(n))
    return make_distribution(zip(_points(rng, n), masses))


def random_affine(rng: np.random.Generator, types: AtomicDistribution) -> AffineValuation:
    """Intercepts and top values both non-decreasing in the type, slopes positive."""
    n = len(types)
    a = np.cumsum(rng.random(n) * rng.choice([0.0, 1.0], size=n, p=[0.3, 0.7]))
    top = np.empty(n)
    prev = 0.0
    for i in range(n):
        prev = max(prev, a[i] + 0.05 + rng.random())
        top[i] = prev
    return AffineValuation(types.values, tuple(a), tuple(top - a))


def random_valuation(rng: np.random.Generator, types: AtomicDistribution) -> Valuation:
    pick = int(rng.integers(0, 4))
    if pick == 3:
        return random_affine(rng, types)
    return NamedValuation(("additive", "hinge", "multiplicative")[pick])


def random_instance(rng: np.random.Generator, max_atoms: int = 6) -> MarketInstance:
    types = random_distribution(rng, max_atoms)
    prior = random_distribution(rng, max_atoms)
    return MarketInstance(random_valuation(rng, types), types, prior)


def random_profile(
    rng: np.random.Generator, max_k: int = 5, min_k: int = 1
) -> QuantileProfile:
    k = int(rng.integers(min_k, max_k + 1))
    inner = np.sort(_points(rng, k - 1))
    return QuantileProfile((0.0, *inner.tolist(), 1.0))


def random_quality_profile(rng: np.random.Generator, max_k: int = 5) -> QualityProfile:
    k = int(rng.integers(1, max_k + 1))
    inner = np.sort(_points(rng, k - 1))
    splits = rng.random(k - 1)
    return QualityProfile((0.0, *inner.tolist(), 1.0), (0.0, *splits.tolist(), 1.0))


class SeparableInstance(NamedTuple):
    g1: tuple[float, ...]
    g2: tuple[float, ...]
    u: tuple[float, ...]
    prior: AtomicDistribution
    types: AtomicDistribution


def random_separable(rng: np.random.Generator, max_atoms: int = 6) -> SeparableInstance:
    prior = random_distribution(rng, max_atoms)
    types = random_distribution(rng, max_atoms)
    g1 = rng.random(len(prior)) * rng.choice([0.0, 1.0], p=[0.1, 0.9])
    g2 = rng.random(len(prior)) * rng.choice([0.0, 1.0], p=[0.1, 0.9])
    u = np.sort(rng.random(len(types)))
    if types.values[0] == 0.0:
        u[0] = 0.0
    return SeparableInstance(tuple(g1), tuple(g2), tuple(u), prior, types)
