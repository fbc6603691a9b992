"""Sandwich class ``max{x, c} <= h(x) <= x + c``: per-bin ratio formula and grid search.

The bin formula is the ratio reached by one parametric family of
(prior, h) pairs, so it bounds the class ratio from below. It reads
``Q_{K+1}`` past the last bin, which is taken to be 1.
"""

from __future__ import annotations

import functools
import math
from typing import NamedTuple

import numpy as np

from .errors import InvalidBin, OutOfRange
from .partition import QuantileProfile

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _terms(a, b, nxt, c):
    w = b - a
    num = c * a + (2.0 * c - c * c) * w + (1.0 + c) * (1.0 - b)
    den = c * b + (nxt - b) + (1.0 + c) * (1.0 - nxt)
    return num, den


def _limit_at_zero(a: float, b: float) -> float:
    # value as c -> 0+ when the denominator vanishes there (Q_r = 1)
    return a + 2.0 * (b - a)


def _bin_edges(profile: QuantileProfile, r: int) -> tuple[float, float, float]:
    if not 1 <= r <= profile.k:
        raise InvalidBin(f"bin {r} outside 1..{profile.k}")
    q = profile.thresholds
    nxt = q[r + 1] if r < profile.k else 1.0
    return q[r - 1], q[r], nxt


def sandwich_bin_ratio(profile: QuantileProfile, r: int, c: float) -> float:
    if not 0.0 <= c <= 1.0:
        raise OutOfRange(f"c = {c!r} outside [0, 1]")
    a, b, nxt = _bin_edges(profile, r)
    num, den = _terms(a, b, nxt, c)
    if den <= 0.0:
        return _limit_at_zero(a, b)
    return num / den


def sandwich_bin_sup(profile: QuantileProfile, r: int, c_step: float = 0.001) -> float:
    """Grid search over c, then golden-section polish around the best cell.

    The bin ratio is a concave quadratic over a positive affine function of c,
    hence unimodal, so polishing one cell suffices.
    """
    if c_step <= 0.0:
        raise OutOfRange("c grid step must be positive")
    n = max(1, round(1.0 / c_step))
    grid = [i / n for i in range(n + 1)]
    vals = [sandwich_bin_ratio(profile, r, c) for c in grid]
    i = max(range(len(vals)), key=vals.__getitem__)
    best = vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n)]
    x1, x2 = hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo)
    f1, f2 = sandwich_bin_ratio(profile, r, x1), sandwich_bin_ratio(profile, r, x2)
    while hi - lo > 1e-12:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = sandwich_bin_ratio(profile, r, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = sandwich_bin_ratio(profile, r, x2)
    return max(best, f1, f2)


def sup_over_c(a, b, nxt) -> np.ndarray:
    """Exact ``sup_c`` of the bin ratio, vectorized over edge triples.

    Candidates are c = 0, c = 1 and the root of the stationarity quadratic
    ``w beta c^2 + 2 w alpha c - alpha (gamma - beta) = 0``.
    """
    a, b, nxt = (np.asarray(x, dtype=float) for x in (a, b, nxt))
    w = b - a
    alpha = 1.0 - b
    beta = b + 1.0 - nxt
    gam = a + 2.0 * w + 1.0 - b

    def f(c):
        num, den = _terms(a, b, nxt, c)
        with np.errstate(all="ignore"):
            return num / den

    at0 = np.where(alpha > 0.0, f(0.0), _limit_at_zero(a, b))
    best = np.maximum(at0, f(1.0))
    qa, qb, qc = w * beta, 2.0 * w * alpha, -alpha * (gam - beta)
    with np.errstate(all="ignore"):
        disc = np.maximum(qb * qb - 4.0 * qa * qc, 0.0)
        root = np.where(
            qa > 0.0,
            (-qb + np.sqrt(disc)) / (2.0 * qa),
            np.where(qb > 0.0, -qc / qb, 0.0),
        )
    root = np.clip(np.nan_to_num(root), 0.0, 1.0)
    inner = f(root)
    return np.maximum(best, np.where(np.isfinite(inner), inner, best))


def sandwich_ratio(profile: QuantileProfile, c_step: float = 0.001) -> float:
    return max(sandwich_bin_sup(profile, r, c_step) for r in range(1, profile.k + 1))


@functools.lru_cache(maxsize=2)
def _bin_table(n: int) -> np.ndarray:
    """``table[a, b, c]``: sup over c of the ratio of a bin with edges
    ``q[a] <= q[b]`` and next edge ``q[c]`` on an n-point grid; inf if unordered."""
    q = np.linspace(0.0, 1.0, n)
    idx = np.arange(n)
    table = np.empty((n, n, n))
    for ia in range(n):
        row = sup_over_c(q[ia], q[:, None], q[None, :])
        invalid = (idx[:, None] < ia) | (idx[None, :] < idx[:, None])
        table[ia] = np.where(invalid, np.inf, row)
    table.flags.writeable = False
    return table


class SandwichSolution(NamedTuple):
    profile: QuantileProfile
    ratio: float


def sandwich_optimize(
    k: int, threshold_step: float = 0.005, c_step: float = 0.001
) -> SandwichSolution:
    """Minimize :func:`sandwich_ratio` over profiles on a threshold grid.

    Bin r's ratio depends only on ``(Q_{r-1}, Q_r, Q_{r+1})``, so the grid
    search is a dynamic program over consecutive threshold pairs. Its minimum
    equals that of enumerating every grid profile.
    """
    if k < 1:
        raise OutOfRange("K must be at least 1")
    if threshold_step <= 0.0:
        raise OutOfRange("threshold grid step must be positive")
    n = round(1.0 / threshold_step) + 1
    q = np.linspace(0.0, 1.0, n)
    last = n - 1

    if k == 1:
        prof = QuantileProfile((0.0, 1.0))
        return SandwichSolution(prof, sandwich_ratio(prof, c_step))

    table = _bin_table(n)

    # value[a, b]: best worst-bin ratio of bins r..K given Q_{r-1}=q[a], Q_r=q[b]
    value = np.full((n, n), np.inf)
    value[:, last] = table[:, last, last]
    choices = []
    for _ in range(k - 1):
        nxt_value = np.empty((n, n))
        choice = np.empty((n, n), dtype=np.intp)
        for ia in range(n):
            cand = np.maximum(table[ia], value)
            choice[ia] = np.argmin(cand, axis=1)
            nxt_value[ia] = cand[np.arange(n), choice[ia]]
        value = nxt_value
        choices.append(choice)

    path = [0, int(np.argmin(value[0]))]
    for choice in reversed(choices):
        path.append(int(choice[path[-2], path[-1]]))
    prof = QuantileProfile(tuple(float(q[i]) for i in path))
    return SandwichSolution(prof, sandwich_ratio(prof, c_step))
