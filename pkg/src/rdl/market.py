"""Valuations, posted-price revenue and the benchmarks built on it."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .dist import VALUE_TOL, AtomicDistribution
from .errors import ChainViolation, GridMismatch, InvariantViolation, NonMonotone, OutOfRange
from .partition import SignalDecomposition, full_info_decomposition, no_info_decomposition

CHAIN_TOL = 1e-9

NAMED_KINDS = ("additive", "hinge", "multiplicative")


def _find(grid: Sequence[float], x: float, what: str) -> int:
    i = bisect.bisect_left(grid, x - VALUE_TOL)
    if i < len(grid) and abs(grid[i] - x) <= VALUE_TOL:
        return i
    raise GridMismatch(f"{what} {x!r} is not on the valuation grid")


@dataclass(frozen=True)
class NamedValuation:
    """One of the closed-form affine families.

    ``additive``: theta + omega. ``hinge``: theta (1 - omega) + omega.
    ``multiplicative``: theta omega + theta.
    """

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in NAMED_KINDS:
            raise InvariantViolation(f"unknown valuation kind {self.kind!r}")

    def coefficients(self, theta: float) -> tuple[float, float]:
        if self.kind == "additive":
            return theta, 1.0
        if self.kind == "hinge":
            return theta, 1.0 - theta
        return theta, theta

    def value(self, theta: float, omega: float) -> float:
        a, b = self.coefficients(theta)
        return a + b * omega


@dataclass(frozen=True)
class AffineValuation:
    """``v(theta, omega) = a(theta) + b(theta) omega`` given pointwise on a type grid."""

    types: tuple[float, ...]
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        types = tuple(float(t) for t in self.types)
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        if not types or not len(types) == len(a) == len(b):
            raise InvariantViolation("affine valuation needs equal-length types, a, b")
        if any(y <= x for x, y in zip(types, types[1:])):
            raise InvariantViolation("affine valuation types must be strictly increasing")
        if any(x < 0.0 for x in a):
            raise OutOfRange("intercepts a(theta) must be non-negative")
        if any(x <= 0.0 for x in b):
            raise OutOfRange("slopes b(theta) must be positive")
        for i in range(1, len(types)):
            if a[i] < a[i - 1] - VALUE_TOL or a[i] + b[i] < a[i - 1] + b[i - 1] - VALUE_TOL:
                raise NonMonotone("valuation must be non-decreasing in the type")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def coefficients(self, theta: float) -> tuple[float, float]:
        i = _find(self.types, theta, "type")
        return self.a[i], self.b[i]

    def value(self, theta: float, omega: float) -> float:
        a, b = self.coefficients(theta)
        return a + b * omega


@dataclass(frozen=True)
class TabularValuation:
    """Arbitrary non-negative values on a (type x quality) grid."""

    types: tuple[float, ...]
    qualities: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        types = tuple(float(t) for t in self.types)
        quals = tuple(float(q) for q in self.qualities)
        rows = tuple(tuple(float(x) for x in row) for row in self.values)
        if not types or not quals:
            raise InvariantViolation("tabular valuation needs a non-empty grid")
        if len(rows) != len(types) or any(len(row) != len(quals) for row in rows):
            raise InvariantViolation("tabular values must be a types x qualities table")
        for grid in (types, quals):
            if any(y <= x for x, y in zip(grid, grid[1:])):
                raise InvariantViolation("tabular grid must be strictly increasing")
        if any(x < 0.0 for row in rows for x in row):
            raise OutOfRange("tabular values must be non-negative")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "qualities", quals)
        object.__setattr__(self, "values", rows)

    def value(self, theta: float, omega: float) -> float:
        return self.values[_find(self.types, theta, "type")][
            _find(self.qualities, omega, "quality")
        ]


Valuation = Union[NamedValuation, AffineValuation, TabularValuation]


@dataclass(frozen=True)
class MarketInstance:
    valuation: Valuation
    types: AtomicDistribution
    prior: AtomicDistribution

    def __post_init__(self) -> None:
        v = self.valuation
        if isinstance(v, (AffineValuation, TabularValuation)):
            for t in self.types.values:
                _find(v.types, t, "type")
        if isinstance(v, TabularValuation):
            for w in self.prior.values:
                _find(v.qualities, w, "quality")


@dataclass(frozen=True)
class IndirectRevenue:
    """Upper envelope of affine pieces ``slope * x + intercept`` on [0, 1]."""

    pieces: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise InvariantViolation("indirect revenue needs at least one piece")
        object.__setattr__(self, "pieces", _prune(self.pieces))

    @classmethod
    def hinge(cls, c: float) -> "IndirectRevenue":
        """The extremal hinge ``max{c, x}``."""
        return cls(((0.0, float(c)), (1.0, 0.0)))

    def __call__(self, x: float) -> float:
        return eval_indirect(self, x)


def _prune(pieces: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    # keep the best intercept per slope, then run an upper-hull pass
    best: dict[float, float] = {}
    for s, c in pieces:
        s, c = float(s), float(c)
        if s not in best or c > best[s]:
            best[s] = c
    lines = sorted(best.items())
    hull: list[tuple[float, float]] = []
    for s, c in lines:
        while hull:
            s1, c1 = hull[-1]
            if c1 <= c:  # steeper and no lower at x=0, so dominant on [0,1]
                hull.pop()
                continue
            if len(hull) >= 2:
                s0, c0 = hull[-2]
                # hull[-1] is useless if the new line overtakes hull[-2] before hull[-1] does
                if (c0 - c) * (s1 - s0) <= (c0 - c1) * (s - s0):
                    hull.pop()
                    continue
            break
        hull.append((s, c))
    # the steepest survivors may only take over beyond x = 1
    while len(hull) >= 2:
        (s0, c0), (s1, c1) = hull[-2], hull[-1]
        if s1 + c1 <= s0 + c0:
            hull.pop()
        else:
            break
    return tuple(hull)


def indirect_revenue(v: Valuation, types: AtomicDistribution) -> IndirectRevenue:
    """Seller's best posted-price revenue as a function of the believed mean quality."""
    if isinstance(v, TabularValuation):
        raise InvariantViolation("indirect revenue needs a valuation affine in quality")
    pieces = []
    for theta in types.values:
        tail = types.tail(theta)
        a, b = v.coefficients(theta)
        pieces.append((tail * b, tail * a))
    return IndirectRevenue(tuple(pieces))


def eval_indirect(h: IndirectRevenue, x: float) -> float:
    if not -VALUE_TOL <= x <= 1.0 + VALUE_TOL:
        raise OutOfRange(f"x = {x!r} outside [0, 1]")
    return max(s * x + c for s, c in h.pieces)


def revenue_from_posterior(
    v: Valuation, types: AtomicDistribution, posterior: AtomicDistribution
) -> float:
    """Optimal posted-price revenue when buyers share ``posterior``.

    Each type's willingness to pay is its expected valuation. The optimal
    price is one of those numbers, so enumerating them is exact.
    """
    wtp = [
        (posterior.expect(lambda w, t=theta: v.value(t, w)), m) for theta, m in types
    ]
    wtp.sort(key=lambda p: -p[0])
    cum = itertools.accumulate(m for _, m in wtp)
    return max(p * q for (p, _), q in zip(wtp, cum))


def revenue(instance: MarketInstance, dec: SignalDecomposition) -> float:
    return math.fsum(
        s.weight * revenue_from_posterior(instance.valuation, instance.types, s.posterior)
        for s in dec
    )


def opt_benchmark(instance: MarketInstance) -> float:
    """Revenue under full disclosure, which is the Bayesian optimum."""
    return revenue(instance, full_info_decomposition(instance.prior))


def myerson(types: AtomicDistribution) -> float:
    return max(theta * types.tail(theta) for theta in types.values)


class CmrsBounds(NamedTuple):
    lower: float
    rev_ni: float
    opt: float
    upper: float


def separable_valuation(
    g1: Sequence[float],
    g2: Sequence[float],
    u: Sequence[float],
    prior: AtomicDistribution,
    types: AtomicDistribution,
) -> TabularValuation:
    """Tabulate ``g2(omega) + g1(omega) u(theta)`` on the supports of F and D.

    ``g1``/``g2`` are aligned with ``prior.values``; ``u`` with ``types.values``.
    """
    if len(g1) != len(prior) or len(g2) != len(prior):
        raise InvariantViolation("g1 and g2 need one entry per prior atom")
    if len(u) != len(types):
        raise InvariantViolation("u needs one entry per type atom")
    if any(x < 0.0 for x in (*g1, *g2, *u)):
        raise OutOfRange("g1, g2 and u must be non-negative")
    if any(y < x for x, y in zip(u, u[1:])):
        raise NonMonotone("u must be non-decreasing in the type")
    rows = tuple(tuple(b + a * ui for a, b in zip(g1, g2)) for ui in u)
    return TabularValuation(types.values, prior.values, rows)


def cmrs_bounds(
    g1: Sequence[float],
    g2: Sequence[float],
    u: Sequence[float],
    prior: AtomicDistribution,
    types: AtomicDistribution,
) -> CmrsBounds:
    """Myerson-based sandwich around no-information and optimal revenue."""
    inst = MarketInstance(separable_valuation(g1, g2, u, prior, types), types, prior)
    e_g1 = math.fsum(a * m for a, m in zip(g1, prior.masses))
    e_g2 = math.fsum(b * m for b, m in zip(g2, prior.masses))
    myer_u = max(ui * types.tail(theta) for ui, theta in zip(u, types.values))
    out = CmrsBounds(
        lower=max(e_g1 * myer_u, e_g2),
        rev_ni=revenue(inst, no_info_decomposition(prior)),
        opt=opt_benchmark(inst),
        upper=e_g1 * myer_u + e_g2,
    )
    for name, lo, hi in (
        ("lower <= rev_ni", out.lower, out.rev_ni),
        ("rev_ni <= opt", out.rev_ni, out.opt),
        ("opt <= upper", out.opt, out.upper),
    ):
        if lo > hi + CHAIN_TOL:
            raise ChainViolation(f"{name} fails: {lo!r} > {hi!r}")
    return out
