import logging
from typing import Dict, List, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..common import OptimizationError
from .optimizers import minimize_on_simplex
from .returns import CovarianceEstimate

logger = logging.getLogger(__name__)

Allocator = Literal["EW", "MVP", "MDP"]
SIMPLEX_TOL = 1e-10


################################################################
# Models
################################################################
class WeightVector(BaseModel):
    """Long-only weights summing to one."""

    model_config = ConfigDict(frozen=True)

    weights: Dict[str, float]

    @model_validator(mode="after")
    def _check_simplex(self):
        if not self.weights:
            raise ValueError("empty weight vector")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError(f"negative weight in {self.weights}")
        total = sum(self.weights.values())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        return self

    @property
    def symbols(self) -> List[str]:
        return list(self.weights)

    def as_array(self, symbols: Sequence[str] = None) -> np.ndarray:
        symbols = self.symbols if symbols is None else symbols
        return np.array([self.weights.get(s, 0.0) for s in symbols])

    def __getitem__(self, symbol: str) -> float:
        return self.weights[symbol]

    def __len__(self):
        return len(self.weights)


################################################################
# Helpers
################################################################
def _to_weights(symbols: Sequence[str], w: np.ndarray) -> WeightVector:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    w = w / w.sum()
    return WeightVector(weights={s: float(x) for s, x in zip(symbols, w)})


def portfolio_variance(cov: CovarianceEstimate, weights: WeightVector) -> float:
    w = weights.as_array(cov.symbols)
    return float(w @ cov.matrix @ w)


def diversification_ratio(cov: CovarianceEstimate, weights: WeightVector) -> float:
    """(w'sigma) / sqrt(w'Sigma w)."""
    w = weights.as_array(cov.symbols)
    return float(w @ cov.vol / np.sqrt(w @ cov.matrix @ w))


################################################################
# Allocators
################################################################
# equally weighted
def equal_weight(symbols: Sequence[str]) -> WeightVector:
    if not symbols:
        raise OptimizationError("equal weight of an empty universe")
    n = len(symbols)
    return WeightVector(weights={s: 1.0 / n for s in symbols})


# minimum variance
def min_variance(cov: CovarianceEstimate) -> WeightVector:
    """Long-only global minimum-variance portfolio."""
    scale = np.trace(cov.matrix) / len(cov.symbols)
    if scale <= 0:
        logger.warning("zero covariance matrix, minimum variance falls back to equal weight")
        return equal_weight(cov.symbols)
    w, iterations = minimize_on_simplex(cov.matrix / scale)
    logger.debug(f"minimum variance solved in {iterations} iterations")
    return _to_weights(cov.symbols, w)


# maximum diversification
def max_diversification(cov: CovarianceEstimate) -> WeightVector:
    """Long-only portfolio maximizing the diversification ratio.

    Solves min y'Cy on the simplex with C the volatility-normalized covariance and maps back
    with w_i = y_i / sigma_i.
    """
    vol = cov.vol
    if np.any(vol <= 0):
        degenerate = [s for s, v in zip(cov.symbols, vol) if v <= 0]
        raise OptimizationError(f"zero volatility for {degenerate}, diversification ratio undefined")
    C = cov.matrix / np.outer(vol, vol)
    y, iterations = minimize_on_simplex((C + C.T) / 2.0)
    logger.debug(f"maximum diversification solved in {iterations} iterations")
    return _to_weights(cov.symbols, y / vol)


def allocate(allocator: Allocator, symbols: Sequence[str], cov: CovarianceEstimate = None) -> WeightVector:
    if allocator == "EW":
        return equal_weight(symbols)
    if cov is None:
        raise OptimizationError(f"{allocator} needs a covariance estimate")
    if allocator == "MVP":
        return min_variance(cov)
    if allocator == "MDP":
        return max_diversification(cov)
    raise OptimizationError(f"unknown allocator '{allocator}'")
