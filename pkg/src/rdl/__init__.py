"""Robust quantile-partition quality disclosure: ratios, revenues and worst cases."""

from .dist import AtomicDistribution, bernoulli, make_distribution, point_mass
from .errors import RdlError
from .market import MarketInstance, opt_benchmark, revenue
from .partition import QualityProfile, QuantileProfile, quantile_decomposition
from .robust import optimal_profile, robust_ratio, solve_gamma_star

__all__ = [
    "AtomicDistribution",
    "MarketInstance",
    "QualityProfile",
    "QuantileProfile",
    "RdlError",
    "bernoulli",
    "make_distribution",
    "opt_benchmark",
    "optimal_profile",
    "point_mass",
    "quantile_decomposition",
    "revenue",
    "robust_ratio",
    "solve_gamma_star",
]
