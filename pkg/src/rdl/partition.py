"""Signaling schemes in reduced form: signal weights plus posteriors.

The raw kernel phi(signal | quality) is never built. Every revenue quantity
downstream depends only on the posteriors and how often each is sent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .dist import (
    VALUE_TOL,
    AtomicDistribution,
    make_distribution,
    point_mass,
    quantile_footprint,
)
from .errors import InvariantViolation, ParseError

# overlaps below this are floating noise from footprint arithmetic
OVERLAP_TOL = 1e-14


def _snap_thresholds(values: Sequence[float], what: str) -> tuple[float, ...]:
    qs = [float(q) for q in values]
    if len(qs) < 2:
        raise InvariantViolation(f"{what}: need at least two thresholds (K >= 1)")
    if abs(qs[0]) > VALUE_TOL:
        raise InvariantViolation(f"{what}: first threshold must be 0, got {qs[0]!r}")
    if abs(qs[-1] - 1.0) > VALUE_TOL:
        raise InvariantViolation(f"{what}: last threshold must be 1, got {qs[-1]!r}")
    qs[0], qs[-1] = 0.0, 1.0
    for i in range(1, len(qs)):
        if qs[i] < qs[i - 1] - VALUE_TOL:
            raise InvariantViolation(
                f"{what}: thresholds not weakly increasing at index {i} "
                f"({qs[i - 1]!r} > {qs[i]!r})"
            )
        qs[i] = max(qs[i], qs[i - 1])
    return tuple(qs)


@dataclass(frozen=True)
class QuantileProfile:
    """Quantile thresholds 0 = Q_0 <= Q_1 <= ... <= Q_K = 1."""

    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "thresholds", _snap_thresholds(self.thresholds, "quantile profile")
        )

    @property
    def k(self) -> int:
        return len(self.thresholds) - 1

    @property
    def widths(self) -> tuple[float, ...]:
        q = self.thresholds
        return tuple(q[r] - q[r - 1] for r in range(1, len(q)))

    def bin(self, r: int) -> tuple[float, float]:
        """Quantile interval ``[Q_{r-1}, Q_r]`` of bin ``r`` (1-based)."""
        return self.thresholds[r - 1], self.thresholds[r]

    @classmethod
    def uniform(cls, k: int) -> "QuantileProfile":
        if k < 1:
            raise InvariantViolation("K must be at least 1")
        return cls(tuple(r / k for r in range(k + 1)))


@dataclass(frozen=True)
class QualityProfile:
    """Quality thresholds with split fractions for mass sitting on a threshold."""

    thresholds: tuple[float, ...]
    splits: tuple[float, ...]

    def __post_init__(self) -> None:
        qs = _snap_thresholds(self.thresholds, "quality profile")
        xi = [float(x) for x in self.splits]
        if len(xi) != len(qs):
            raise InvariantViolation("quality profile: need one split per threshold")
        if any(not 0.0 <= x <= 1.0 for x in xi):
            raise InvariantViolation("quality profile: splits must lie in [0, 1]")
        if xi[0] != 0.0 or xi[-1] != 1.0:
            raise InvariantViolation("quality profile: splits must start at 0 and end at 1")
        object.__setattr__(self, "thresholds", qs)
        object.__setattr__(self, "splits", tuple(xi))

    @property
    def k(self) -> int:
        return len(self.thresholds) - 1


PRESETS: dict[str, tuple[float, ...]] = {
    "upwork": (0.0, 0.9, 0.97, 0.99, 1.0),
    "airbnb": (0.0, 0.1, 0.9, 0.95, 0.99, 1.0),
}


def preset(name: str) -> QuantileProfile:
    """Named profile: ``upwork``, ``airbnb`` or ``uniform:K``."""
    key = name.strip().lower()
    if key.startswith("uniform:"):
        try:
            k = int(key.split(":", 1)[1])
        except ValueError:
            raise ParseError("preset", f"bad uniform preset {name!r}") from None
        return QuantileProfile.uniform(k)
    if key not in PRESETS:
        raise ParseError("preset", f"unknown preset {name!r}")
    return QuantileProfile(PRESETS[key])


class Signal(NamedTuple):
    weight: float
    posterior: AtomicDistribution
    label: int


@dataclass(frozen=True)
class SignalDecomposition:
    """Weighted posteriors whose mixture is the prior.

    ``label`` on each signal records which bin (or atom index) produced it.
    """

    signals: tuple[Signal, ...]

    def __post_init__(self) -> None:
        if not self.signals:
            raise InvariantViolation("decomposition has no signals")
        if any(s.weight <= 0.0 for s in self.signals):
            raise InvariantViolation("zero-weight signals must be omitted")
        if abs(math.fsum(s.weight for s in self.signals) - 1.0) > 1e-9:
            raise InvariantViolation("signal weights must sum to 1")

    def __len__(self) -> int:
        return len(self.signals)

    def __iter__(self):
        return iter(self.signals)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(s.weight for s in self.signals)

    @property
    def posteriors(self) -> tuple[AtomicDistribution, ...]:
        return tuple(s.posterior for s in self.signals)

    def parts(self) -> list[tuple[float, AtomicDistribution]]:
        return [(s.weight, s.posterior) for s in self.signals]


def quantile_decomposition(
    prior: AtomicDistribution, profile: QuantileProfile
) -> SignalDecomposition:
    """Pool prior mass by quantile: bin r receives the overlap of each atom's
    footprint with ``[Q_{r-1}, Q_r]``. Zero-width bins send no signal."""
    feet = quantile_footprint(prior)
    signals = []
    for r in range(1, profile.k + 1):
        lo, hi = profile.bin(r)
        width = hi - lo
        if width <= 0.0:
            continue
        overlaps = [(f.value, min(f.q_hi, hi) - max(f.q_lo, lo)) for f in feet]
        pieces = [(v, m) for v, m in overlaps if m > OVERLAP_TOL]
        if not pieces:  # bin narrower than the noise floor
            pieces = [max(overlaps, key=lambda p: p[1])]
        signals.append(Signal(width, make_distribution(pieces), r))
    return SignalDecomposition(tuple(signals))


def full_info_decomposition(prior: AtomicDistribution) -> SignalDecomposition:
    return SignalDecomposition(
        tuple(Signal(m, point_mass(v), i) for i, (v, m) in enumerate(prior))
    )


def no_info_decomposition(prior: AtomicDistribution) -> SignalDecomposition:
    return SignalDecomposition((Signal(1.0, prior, 0),))


def quality_decomposition(
    prior: AtomicDistribution, profile: QualityProfile
) -> SignalDecomposition:
    """Pool prior mass by raw quality thresholds.

    Bin r gets all mass strictly inside ``(w_{r-1}, w_r)``, a fraction
    ``xi_r`` of an atom sitting on ``w_r`` and ``1 - xi_{r-1}`` of an atom on
    ``w_{r-1}``. When several thresholds coincide at an atom, the split of
    the first one applies: its left share goes to the first bin ending there
    and the rest to the first bin starting after the last coinciding
    threshold (or to bin K when that threshold is 1).
    """
    w, xi, k = profile.thresholds, profile.splits, profile.k
    buckets: list[list[tuple[float, float]]] = [[] for _ in range(k + 1)]
    for v, m in prior:
        hits = [i for i, t in enumerate(w) if abs(t - v) <= VALUE_TOL]
        if not hits:
            r = next(i for i in range(1, k + 1) if w[i - 1] < v < w[i])
            buckets[r].append((v, m))
            continue
        first, last = hits[0], hits[-1]
        left = xi[first] * m if first >= 1 else 0.0
        right = m - left
        if left > 0.0:
            buckets[first].append((v, left))
        if right > 0.0:
            buckets[last + 1 if last < k else k].append((v, right))
    signals = []
    for r in range(1, k + 1):
        pieces = buckets[r]
        weight = math.fsum(m for _, m in pieces)
        if weight > 0.0:
            signals.append(Signal(weight, make_distribution(pieces), r))
    return SignalDecomposition(tuple(signals))


def posterior_mean_distribution(dec: SignalDecomposition) -> AtomicDistribution:
    return make_distribution((s.posterior.mean(), s.weight) for s in dec)
