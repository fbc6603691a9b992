"""Closed-form robust ratio machinery for quantile partitions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dist import AtomicDistribution
from .errors import BracketFailure, NegativeInput, OutOfRange, RecursionInconsistency
from .partition import QuantileProfile, posterior_mean_distribution, quantile_decomposition

CLAMP_TOL = 1e-9
RECURSION_TOL = 1e-6
GOLDEN_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def lambda_step(z: float, gamma: float) -> float:
    """``z + (gamma - 1)(1 + sqrt z)^2``."""
    if z < 0.0:
        raise NegativeInput(f"z = {z!r} is negative")
    if gamma < 1.0:
        raise OutOfRange(f"gamma = {gamma!r} is below 1")
    return z + (gamma - 1.0) * (1.0 + math.sqrt(z)) ** 2


def big_lambda(gamma: float, k: int) -> float:
    """K-fold composition of :func:`lambda_step` starting from 0."""
    z = 0.0
    for _ in range(k):
        z = lambda_step(z, gamma)
    return z


def ratio_bounds(k: int) -> tuple[float, float]:
    if k < 1:
        raise OutOfRange("K must be at least 1")
    return 1.0 + 1.0 / (4 * k), 1.0 + 1.0 / k


def solve_gamma_star(k: int, tol: float = 1e-12) -> float:
    """Root of ``big_lambda(gamma, k) = 1`` by bisection on the a-priori bracket."""
    if tol <= 0.0:
        raise OutOfRange("tol must be positive")
    lo, hi = ratio_bounds(k)
    f_lo, f_hi = big_lambda(lo, k) - 1.0, big_lambda(hi, k) - 1.0
    if f_hi == 0.0:
        return hi
    if f_lo == 0.0:
        return lo
    if f_lo > 0.0 or f_hi < 0.0:
        raise BracketFailure(f"no sign change on [{lo}, {hi}] for K={k}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if big_lambda(mid, k) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class OptimalSolution(NamedTuple):
    gamma_star: float
    profile: QuantileProfile


def threshold_recursion(gamma: float, k: int) -> list[float]:
    """Unclamped backward recursion ``Q_{r-1} = 1 - lambda(1 - Q_r)`` from ``Q_K = 1``."""
    qs = [1.0]
    for _ in range(k):
        qs.append(1.0 - lambda_step(max(1.0 - qs[-1], 0.0), gamma))
    return qs[::-1]


def optimal_profile(k: int, tol: float = 1e-12) -> OptimalSolution:
    gamma = solve_gamma_star(k, tol)
    qs = threshold_recursion(gamma, k)
    q0 = qs[0]
    if abs(q0) > RECURSION_TOL:
        raise RecursionInconsistency(f"recursion ends at Q_0 = {q0!r}, not 0")
    if abs(q0) > CLAMP_TOL:
        warnings.warn(f"Q_0 = {q0!r} clamped to 0", RuntimeWarning, stacklevel=2)
    qs[0] = 0.0
    return OptimalSolution(gamma, QuantileProfile(tuple(qs)))


class BinTerm(NamedTuple):
    r: int
    term: float


@dataclass(frozen=True)
class RatioReport:
    per_bin: tuple[BinTerm, ...]
    ratio: float
    argmax_bin: int


def bin_term(q_prev: float, q_r: float) -> float:
    return 1.0 + (q_r - q_prev) / (1.0 + math.sqrt(max(1.0 - q_r, 0.0))) ** 2


def robust_ratio(profile: QuantileProfile) -> RatioReport:
    q = profile.thresholds
    terms = tuple(BinTerm(r, bin_term(q[r - 1], q[r])) for r in range(1, profile.k + 1))
    best = max(terms, key=lambda t: t.term)  # max() keeps the first maximizer
    return RatioReport(terms, best.term, best.r)


def check_decreasing_margins(profile: QuantileProfile) -> bool:
    w = profile.widths
    return all(a > b for a, b in zip(w, w[1:]))


def feasible_profile(gamma: float, k: int) -> QuantileProfile | None:
    """Profile with robust ratio at most ``gamma``, or None when none exists.

    Runs the recursion forward from ``s_K = 0`` and rescales by ``s_0``; a
    profile exists exactly when ``big_lambda(gamma, k) >= 1``.
    """
    s = [0.0]
    for _ in range(k):
        s.append(lambda_step(s[-1], gamma))
    s0 = s[-1]
    if s0 < 1.0:
        return None
    s = s[::-1]
    qs = [1.0 - x / s0 for x in s]
    qs[0] = 0.0
    return QuantileProfile(tuple(qs))


def _hinge_means(
    prior: AtomicDistribution, profile: QuantileProfile
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    pm = posterior_mean_distribution(quantile_decomposition(prior, profile))
    return (
        np.asarray(prior.values),
        np.asarray(prior.masses),
        np.asarray(pm.values),
        np.asarray(pm.masses),
    )


def _ratio_at(c: np.ndarray, xs, ms, ys, ns) -> np.ndarray:
    c = np.asarray(c, dtype=float)[..., None]
    num = (np.maximum(c, xs) * ms).sum(axis=-1)
    den = (np.maximum(c, ys) * ns).sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return np.where(den > 0.0, out, 1.0)


def hinge_ratio(prior: AtomicDistribution, profile: QuantileProfile, c: float) -> float:
    """``E_F[max(c, x)] / E[max(c, x)]`` under the posterior-mean distribution.

    Returns 1 when both sides vanish (prior at 0 with c = 0).
    """
    if not 0.0 <= c <= 1.0:
        raise OutOfRange(f"c = {c!r} outside [0, 1]")
    return float(_ratio_at(np.array(c), *_hinge_means(prior, profile)))


def hinge_candidates(prior: AtomicDistribution, profile: QuantileProfile) -> list[float]:
    """Kinks of the hinge ratio plus the per-bin closed-form maximizers."""
    dec = quantile_decomposition(prior, profile)
    cands = {0.0, 1.0, *prior.values, *(s.posterior.mean() for s in dec)}
    for q in profile.thresholds[1:]:
        root = math.sqrt(max(1.0 - q, 0.0))
        cands.add(root / (1.0 + root) * prior.quantile(q))
    return sorted(min(max(c, 0.0), 1.0) for c in cands)


def worst_hinge_ratio(
    prior: AtomicDistribution, profile: QuantileProfile
) -> tuple[float, float]:
    """Supremum of :func:`hinge_ratio` over ``c`` in [0, 1], with a maximizer."""
    data = _hinge_means(prior, profile)
    cands = np.asarray(hinge_candidates(prior, profile))
    vals = _ratio_at(cands, *data)
    i = int(np.argmax(vals))
    best, c_best = float(vals[i]), float(cands[i])
    if len(cands) < 2:
        return best, c_best

    # golden-section polish on every interval between consecutive candidates
    lo, hi = cands[:-1].copy(), cands[1:].copy()
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = _ratio_at(x1, *data), _ratio_at(x2, *data)
    while np.max(hi - lo) > GOLDEN_TOL:
        left = f1 >= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - _INV_PHI * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + _INV_PHI * (hi - lo))
        x1, x2 = nx1, nx2
        f1, f2 = _ratio_at(x1, *data), _ratio_at(x2, *data)
    mids = 0.5 * (lo + hi)
    fm = _ratio_at(mids, *data)
    j = int(np.argmax(fm))
    if fm[j] > best:
        best, c_best = float(fm[j]), float(mids[j])
    return best, c_best
