import logging
from typing import Mapping, NamedTuple

from ..allocation import WeightVector
from ..common import BacktestError
from .models import Holdings

logger = logging.getLogger(__name__)

MAX_FEE_ITERATIONS = 50
FEE_TOL = 1e-14
UNIT_CHANGE_TOL = 1e-12


class Fill(NamedTuple):
    holdings: Holdings
    fee: float
    trades: int
    turnover: float


# rebalance
def apply_rebalance(holdings: Holdings, target: WeightVector, prices: Mapping[str, float], fee_rate: float) -> Fill:
    """Trade `holdings` to `target` weights at `prices`, paying fee_rate on traded notional.

    The post-fee value V solves V = V_pre - fee_rate * sum_i |target_i * V - units_i * price_i|,
    found by fixed-point iteration (a contraction for fee_rate < 1). All cash is invested.

    Raises:
        BacktestError: the fee would consume the whole portfolio.
    """
    value_pre = holdings.value(prices)
    symbols = list(target.weights) + [s for s in holdings.units if s not in target.weights]
    current = {s: holdings.units.get(s, 0.0) * prices[s] for s in symbols}

    def traded(value):
        return sum(abs(target.weights.get(s, 0.0) * value - current[s]) for s in symbols)

    value = value_pre
    for _ in range(MAX_FEE_ITERATIONS):
        updated = value_pre - fee_rate * traded(value)
        converged = abs(updated - value) <= FEE_TOL * value_pre
        value = updated
        if converged:
            break
    else:
        logger.warning(f"fee fixed point not converged after {MAX_FEE_ITERATIONS} iterations")

    turnover = traded(value)
    fee = fee_rate * turnover
    value_post = value_pre - fee
    if value_post <= 0:
        raise BacktestError(f"infeasible rebalance: fee {fee} exceeds portfolio value {value_pre}")

    units = {s: w * value_post / prices[s] for s, w in target.weights.items() if w > 0}
    trades = 0
    for s in symbols:
        old, new = holdings.units.get(s, 0.0), units.get(s, 0.0)
        if abs(new - old) > UNIT_CHANGE_TOL * max(abs(old), abs(new)):
            trades += 1

    return Fill(holdings=Holdings(units=units, cash=0.0), fee=fee, trades=trades, turnover=turnover)
