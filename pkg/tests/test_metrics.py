import math

import numpy as np
import pandas as pd
import pytest

from sigport.common import MetricsError
from sigport.metrics import annualized_return, annualized_volatility, calmar, max_drawdown, sharpe, summarize

# (annualized return, annualized volatility, sharpe, calmar, mdd) of the published strategy tables
PUBLISHED = {
    "PORTFOLIO_EW": (0.5984, 0.8219, 0.7281, 0.7291, 0.8203),
    "PORTFOLIO_SIG_CLUSTER_EW_FOT": (0.9592, 0.6319, 1.5178, 1.5879, 0.6036),
    "PORTFOLIO_SIG_CLUSTER_EW_RW": (1.2523, 0.7432, 1.6849, 2.0306, 0.6163),
    "PORTFOLIO_MVP": (0.1140, 0.4262, 0.2674, 0.2510, 0.4539),
    "PORTFOLIO_SIG_CLUSTER_MVP_FOT": (0.2199, 0.6775, 0.3245, 0.3171, 0.6928),
    "PORTFOLIO_SIG_CLUSTER_MVP_RW": (0.1488, 0.6675, 0.2229, 0.1754, 0.8476),
    "PORTFOLIO_MDP": (0.2543, 0.5742, 0.4429, 0.3974, 0.6394),
    "PORTFOLIO_SIG_CLUSTER_MDP_FOT": (0.4013, 0.6676, 0.6011, 0.5608, 0.7151),
    "PORTFOLIO_SIG_CLUSTER_MDP_RW": (1.1903, 0.7603, 1.5655, 1.6362, 0.7268),
}


def daily(values, start: str = "2022-01-01") -> pd.Series:
    return pd.Series(values, index=pd.date_range(start, periods=len(values), freq="D"), dtype=float)


class TestAnnualizedReturn:

    def test_flat(self) -> None:
        assert annualized_return(daily([1.0] * 30)) == 0.0

    def test_doubling_in_a_year(self) -> None:
        assert annualized_return(daily(np.linspace(1.0, 2.0, 366))) == pytest.approx(1.0, abs=1e-12)

    def test_constant_growth(self) -> None:
        g = 0.001
        values = daily((1 + g) ** np.arange(731))
        assert abs(annualized_return(values) - ((1 + g) ** 365 - 1)) <= 1e-10

    def test_scale_invariance(self) -> None:
        values = daily(np.exp(np.cumsum(np.random.default_rng(0).normal(0, 0.02, size=400))))
        assert annualized_return(values * 42.0) == pytest.approx(annualized_return(values), rel=1e-12)

    def test_arithmetic(self) -> None:
        assert annualized_return(daily(np.linspace(1.0, 1.5, 731)), geometric=False) == pytest.approx(0.25)

    def test_zero_span(self) -> None:
        with pytest.raises(MetricsError):
            annualized_return(daily([1.0]))

    def test_non_positive(self) -> None:
        with pytest.raises(MetricsError):
            annualized_return(daily([1.0, 0.0, 2.0]))

    def test_positional_index_is_daily(self) -> None:
        assert annualized_return(np.linspace(1.0, 2.0, 366)) == pytest.approx(1.0, abs=1e-12)


class TestAnnualizedVolatility:

    def test_flat(self) -> None:
        assert annualized_volatility(daily([3.0] * 10)) == 0.0

    def test_alternating(self) -> None:
        r = 0.05
        values = daily(np.exp(np.cumsum([0.0] + [r, -r] * 50)))
        assert abs(annualized_volatility(values) - r * math.sqrt(365)) <= 1e-12

    def test_monte_carlo(self) -> None:
        sigma = 0.03
        values = daily(np.exp(np.cumsum(np.random.default_rng(1).normal(0, sigma, size=10_000))))
        assert annualized_volatility(values) == pytest.approx(sigma * math.sqrt(365), rel=0.05)

    def test_invariances(self) -> None:
        values = daily(np.exp(np.cumsum(np.random.default_rng(2).normal(0, 0.02, size=200))))
        base = annualized_volatility(values)
        assert annualized_volatility(values * 7.0) == pytest.approx(base, rel=1e-12)
        assert annualized_volatility(np.exp(np.log(values) + 3.0)) == pytest.approx(base, rel=1e-10)

    def test_too_few(self) -> None:
        with pytest.raises(MetricsError):
            annualized_volatility(daily([1.0, 1.1]))


class TestMaxDrawdown:

    def test_monotone(self) -> None:
        assert max_drawdown(daily(np.arange(1.0, 20.0))) == 0.0

    def test_example(self) -> None:
        assert max_drawdown(daily([100, 120, 90, 110])) == pytest.approx(0.25)

    def test_brute_force(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = np.exp(np.cumsum(rng.normal(0, 0.05, size=80)))
            expected = max(1 - v[j] / v[i] for i in range(len(v)) for j in range(i, len(v)))
            assert max_drawdown(v) == pytest.approx(expected, abs=1e-15)
            assert 0.0 <= max_drawdown(v) < 1.0
            assert max_drawdown(v * 3.3) == pytest.approx(max_drawdown(v), abs=1e-15)

    def test_empty(self) -> None:
        with pytest.raises(MetricsError):
            max_drawdown([])


class TestRatios:

    def test_examples(self) -> None:
        assert sharpe(0.5984, 0.8219) == pytest.approx(0.7281, abs=2e-3)
        assert sharpe(1.2523, 0.7432) == pytest.approx(1.6849, abs=2e-3)
        assert calmar(1.1903, 0.7268) == pytest.approx(1.6362, abs=2e-3)

    @pytest.mark.parametrize("strategy", sorted(PUBLISHED))
    def test_published_identities(self, strategy: str) -> None:
        ann_ret, ann_vol, expected_sharpe, expected_calmar, mdd = PUBLISHED[strategy]
        assert abs(sharpe(ann_ret, ann_vol) - expected_sharpe) <= 2e-3
        assert abs(calmar(ann_ret, mdd) - expected_calmar) <= 2e-3

    def test_zero_denominator(self) -> None:
        with pytest.raises(MetricsError):
            sharpe(0.1, 0.0)
        with pytest.raises(MetricsError):
            calmar(0.1, 0.0)


class TestSummarize:

    def test_consistent(self) -> None:
        values = daily(np.exp(np.cumsum(np.random.default_rng(4).normal(0.001, 0.03, size=500))))
        m = summarize(values)
        assert m.sharpe == pytest.approx(m.annualized_return / m.annualized_volatility)
        assert m.calmar == pytest.approx(m.annualized_return / m.mdd)

    def test_undefined_ratios_are_nan(self) -> None:
        m = summarize(daily([1.0] * 10))
        assert m.annualized_return == 0.0 and m.mdd == 0.0
        assert math.isnan(m.sharpe) and math.isnan(m.calmar)
