from . import optimizers, portfolios, returns
from .optimizers import kkt_residual, minimize_on_simplex, project_simplex
from .portfolios import (
    Allocator,
    WeightVector,
    allocate,
    diversification_ratio,
    equal_weight,
    max_diversification,
    min_variance,
    portfolio_variance,
)
from .returns import CovarianceEstimate, compute_returns, estimate_covariance

__all__ = ["optimizers", "portfolios", "returns"]
