"""Sparse group MAP estimation of many sparse normal mean vectors."""

from .estimator import EstimateResult, PenaltyConfig, estimate, hard_threshold_fast_path
from .lasso import GridSpec, LassoParams, group_lasso, oracle_tune, sparse_group_lasso
from .model import MeanSet, ObservationSet, SimScenario, generate, sum_squared_error
from .priors import binomial_prior, truncated_geometric_prior, uniform_prior, universal_xi
from .simulation import EstimatorSpec, run_mse

__all__ = [
    "EstimateResult",
    "EstimatorSpec",
    "GridSpec",
    "LassoParams",
    "MeanSet",
    "ObservationSet",
    "PenaltyConfig",
    "SimScenario",
    "binomial_prior",
    "estimate",
    "generate",
    "group_lasso",
    "hard_threshold_fast_path",
    "oracle_tune",
    "run_mse",
    "sparse_group_lasso",
    "sum_squared_error",
    "truncated_geometric_prior",
    "uniform_prior",
    "universal_xi",
]

__version__ = "0.1.0"
