"""
Performance metrics of a daily value series.

Conventions: zero risk-free rate, 365-day year, geometric annualized return and
population standard deviation of daily log returns unless told otherwise.
"""
import logging
import math

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..common import MetricsError

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365


################################################################
# Models
################################################################
class MetricSummary(BaseModel):
    annualized_return: float
    annualized_volatility: float
    sharpe: float
    calmar: float
    mdd: float


################################################################
# Helpers
################################################################
def _as_series(values) -> pd.Series:
    series = values if isinstance(values, pd.Series) else pd.Series(np.asarray(values, dtype=float))
    series = series.astype(float)
    if (series <= 0).any() or not np.all(np.isfinite(series.to_numpy())):
        raise MetricsError("values must be positive and finite")
    return series


def _span_days(series: pd.Series) -> int:
    if isinstance(series.index, pd.DatetimeIndex):
        return int((series.index[-1] - series.index[0]).days)
    # positional index, one day per value
    return len(series) - 1


################################################################
# Metrics
################################################################
def annualized_return(values, days_per_year: int = DAYS_PER_YEAR, geometric: bool = True) -> float:
    """(V_end / V_start) ** (365 / D) - 1 over the D calendar days spanned."""
    series = _as_series(values)
    if len(series) < 2:
        raise MetricsError("annualized return needs at least 2 values")
    days = _span_days(series)
    if days <= 0:
        raise MetricsError("annualized return over a span of 0 days")
    growth = series.iloc[-1] / series.iloc[0]
    if geometric:
        return float(growth ** (days_per_year / days) - 1.0)
    return float((growth - 1.0) * days_per_year / days)


def annualized_volatility(values, days_per_year: int = DAYS_PER_YEAR, log_returns: bool = True) -> float:
    series = _as_series(values)
    if len(series) < 3:
        raise MetricsError("annualized volatility needs at least 3 values")
    v = series.to_numpy()
    returns = np.diff(np.log(v)) if log_returns else v[1:] / v[:-1] - 1.0
    return float(np.std(returns) * math.sqrt(days_per_year))


def max_drawdown(values) -> float:
    """Largest peak-to-trough decline, 1 - V_t / max_{s<=t} V_s."""
    series = _as_series(values)
    if series.empty:
        raise MetricsError("max drawdown of an empty series")
    v = series.to_numpy()
    return float(np.max(1.0 - v / np.maximum.accumulate(v)))


def sharpe(ann_ret: float, ann_vol: float) -> float:
    if ann_vol <= 0:
        raise MetricsError("sharpe ratio with zero volatility")
    return ann_ret / ann_vol


def calmar(ann_ret: float, mdd: float) -> float:
    if mdd <= 0:
        raise MetricsError("calmar ratio with zero drawdown")
    return ann_ret / mdd


def summarize(
    values, days_per_year: int = DAYS_PER_YEAR, geometric: bool = True, log_returns: bool = True
) -> MetricSummary:
    """All metrics at once; undefined ratios are NaN."""
    ann_ret = annualized_return(values, days_per_year=days_per_year, geometric=geometric)
    ann_vol = annualized_volatility(values, days_per_year=days_per_year, log_returns=log_returns)
    mdd = max_drawdown(values)
    return MetricSummary(
        annualized_return=ann_ret,
        annualized_volatility=ann_vol,
        sharpe=sharpe(ann_ret, ann_vol) if ann_vol > 0 else math.nan,
        calmar=calmar(ann_ret, mdd) if mdd > 0 else math.nan,
        mdd=mdd,
    )
