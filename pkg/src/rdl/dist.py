"""Finite-support distributions on [0, 1].

CDFs are left-continuous, ``F(w) = P[x < w]``, so an atom at ``w`` occupies
the closed quantile interval ``[F(w), F(w) + mass]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

from .errors import EmptySupport, InvariantViolation, NonMonotone, OutOfRange

MASS_TOL = 1e-9
VALUE_TOL = 1e-12


class Footprint(NamedTuple):
    value: float
    q_lo: float
    q_hi: float


@dataclass(frozen=True)
class AtomicDistribution:
    """Probability distribution with finitely many atoms in [0, 1].

    Build instances with :func:`make_distribution`; the constructor only
    validates.
    """

    values: tuple[float, ...]
    masses: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise EmptySupport("distribution has no atoms")
        if len(self.values) != len(self.masses):
            raise InvariantViolation("values and masses differ in length")
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise OutOfRange(f"atom value {v!r} outside [0, 1]")
        for lo, hi in zip(self.values, self.values[1:]):
            if not lo < hi:
                raise InvariantViolation("atom values must be strictly increasing")
        if any(m <= 0.0 for m in self.masses):
            raise InvariantViolation("atom masses must be strictly positive")
        if abs(math.fsum(self.masses) - 1.0) > MASS_TOL:
            raise InvariantViolation("atom masses must sum to 1")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(zip(self.values, self.masses))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(self)

    @property
    def is_point_mass(self) -> bool:
        return len(self.values) == 1

    def mean(self) -> float:
        return math.fsum(v * m for v, m in self)

    def expect(self, fn: Callable[[float], float]) -> float:
        return math.fsum(fn(v) * m for v, m in self)

    def cdf(self, x: float) -> float:
        """Left-continuous CDF: mass strictly below ``x``."""
        return math.fsum(m for v, m in self if v < x)

    def tail(self, x: float) -> float:
        """Mass at or above ``x`` (``1 - cdf(x)``)."""
        return math.fsum(m for v, m in self if v >= x)

    def quantile(self, u: float) -> float:
        """Smallest atom whose cumulative mass reaches ``u``."""
        if not 0.0 <= u <= 1.0:
            raise OutOfRange(f"quantile level {u!r} outside [0, 1]")
        acc = 0.0
        for v, m in self:
            acc += m
            if acc >= u - VALUE_TOL:
                return v
        return self.values[-1]


def make_distribution(pairs: Iterable[tuple[float, float]]) -> AtomicDistribution:
    """Sort, merge duplicate values, drop zero masses and renormalize."""
    items = [(float(v), float(m)) for v, m in pairs]
    if not items:
        raise EmptySupport("no atoms given")
    cleaned = []
    for v, m in items:
        if m < 0.0 or math.isnan(m):
            raise OutOfRange(f"negative mass {m!r} at value {v!r}")
        if not -VALUE_TOL <= v <= 1.0 + VALUE_TOL:
            raise OutOfRange(f"atom value {v!r} outside [0, 1]")
        if m > 0.0:
            cleaned.append((min(max(v, 0.0), 1.0), m))
    total = math.fsum(m for _, m in cleaned)
    if total <= 0.0:
        raise EmptySupport("total mass is zero")
    cleaned.sort()

    values: list[float] = []
    groups: list[list[float]] = []
    for v, m in cleaned:
        if values and v - values[-1] <= VALUE_TOL:
            groups[-1].append(m)
        else:
            values.append(v)
            groups.append([m])
    masses = tuple(math.fsum(g) / total for g in groups)
    return AtomicDistribution(tuple(values), masses)


def point_mass(x: float) -> AtomicDistribution:
    return make_distribution([(x, 1.0)])


def bernoulli(p: float) -> AtomicDistribution:
    """Two-point distribution on {0, 1} with mass ``p`` at 1."""
    return make_distribution([(0.0, 1.0 - p), (1.0, p)])


def mean(d: AtomicDistribution) -> float:
    return d.mean()


def quantile_footprint(d: AtomicDistribution) -> tuple[Footprint, ...]:
    cum = list(itertools.accumulate(d.masses))
    cum[-1] = 1.0  # pin the last edge so the tiling is exact
    lows = [0.0, *cum[:-1]]
    return tuple(Footprint(v, lo, hi) for v, lo, hi in zip(d.values, lows, cum))


def discretize(quantile_fn: Callable[[float], float], n: int) -> AtomicDistribution:
    """Mass-midpoint discretization of a continuous prior given by its quantile function."""
    if n < 1:
        raise OutOfRange("n must be a positive integer")
    samples = [float(quantile_fn((i - 0.5) / n)) for i in range(1, n + 1)]
    for a, b in zip(samples, samples[1:]):
        if b < a - VALUE_TOL:
            raise NonMonotone(f"quantile function decreases from {a!r} to {b!r}")
    running = []
    hi = -math.inf
    for s in samples:
        hi = max(hi, s)
        running.append(hi)
    return make_distribution((v, 1.0 / n) for v in running)


def mixture(parts: Sequence[tuple[float, AtomicDistribution]]) -> AtomicDistribution:
    if not parts:
        raise EmptySupport("empty mixture")
    weights = [float(w) for w, _ in parts]
    if any(w < 0.0 for w in weights):
        raise OutOfRange("mixture weights must be non-negative")
    if abs(math.fsum(weights) - 1.0) > MASS_TOL:
        raise InvariantViolation("mixture weights must sum to 1")
    return make_distribution((v, w * m) for w, d in parts for v, m in d)
