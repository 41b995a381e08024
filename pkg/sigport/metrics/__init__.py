from . import performance
from .performance import (
    MetricSummary,
    annualized_return,
    annualized_volatility,
    calmar,
    max_drawdown,
    sharpe,
    summarize,
)

__all__ = ["performance"]
