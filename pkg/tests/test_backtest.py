from datetime import date, timedelta

import numpy as np
import pandas as pd
import pytest

from sigport.allocation import WeightVector
from sigport.backtest import Holdings, StrategyConfig, UniverseSelector, apply_rebalance, rebase_annually, run_backtest
from sigport.common import BacktestError
from sigport.data import WindowPolicy, window_slice
from sigport.signature import asset_features

from conftest import constant_universe, truncate

START = date(2022, 2, 7)
END = date(2022, 6, 27)


# ---------------------------------------------------------------------------
# apply_rebalance
# ---------------------------------------------------------------------------

class TestApplyRebalance:

    def test_all_cash_into_one_asset(self) -> None:
        f = 0.002
        fill = apply_rebalance(Holdings(), WeightVector(weights={"A": 1.0}), {"A": 10.0}, f)
        assert fill.fee == pytest.approx(f / (1 + f), rel=1e-12)
        assert fill.trades == 1
        assert fill.holdings.cash == 0.0
        assert fill.holdings.units["A"] * 10.0 == pytest.approx(1 / (1 + f), rel=1e-12)

    def test_target_equal_to_current(self) -> None:
        holdings = Holdings(units={"A": 1.0, "B": 2.0}, cash=0.0)
        fill = apply_rebalance(holdings, WeightVector(weights={"A": 0.5, "B": 0.5}), {"A": 10.0, "B": 5.0}, 0.002)
        assert fill.fee == 0.0
        assert fill.trades == 0
        assert fill.holdings.units == {"A": 1.0, "B": 2.0}

    def test_sold_asset_leaves_holdings(self) -> None:
        holdings = Holdings(units={"A": 1.0, "B": 2.0}, cash=0.0)
        fill = apply_rebalance(holdings, WeightVector(weights={"A": 1.0}), {"A": 10.0, "B": 5.0}, 0.002)
        assert "B" not in fill.holdings.units
        assert fill.trades == 2
        assert fill.fee == pytest.approx(0.002 * fill.turnover, rel=1e-12)
        assert fill.holdings.value({"A": 10.0}) == pytest.approx(20.0 - fill.fee, rel=1e-12)

    def test_zero_fee_keeps_value(self) -> None:
        holdings = Holdings(units={"A": 3.0}, cash=0.5)
        prices = {"A": 2.0, "B": 4.0}
        fill = apply_rebalance(holdings, WeightVector(weights={"A": 0.3, "B": 0.7}), prices, 0.0)
        assert fill.fee == 0.0
        assert fill.holdings.value(prices) == pytest.approx(6.5, rel=1e-12)
        assert fill.holdings.weights(prices) == pytest.approx({"A": 0.3, "B": 0.7}, rel=1e-12)


# ---------------------------------------------------------------------------
# StrategyConfig
# ---------------------------------------------------------------------------

class TestStrategyConfig:

    def test_labels(self) -> None:
        assert StrategyConfig(allocator="EW").label == "PORTFOLIO_EW"
        assert StrategyConfig(allocator="mvp", policy="rw").label == "PORTFOLIO_MVP_RW"
        assert StrategyConfig(allocator="MDP", filtered=True, policy="FOT").label == "PORTFOLIO_SIG_CLUSTER_MDP_FOT"
        assert StrategyConfig(name="mine").label == "mine"

    def test_rejects_out_of_range(self) -> None:
        with pytest.raises(ValueError):
            StrategyConfig(fee_rate=0.5)
        with pytest.raises(ValueError):
            StrategyConfig(k=0)
        with pytest.raises(ValueError):
            StrategyConfig(allocator="RP")


# ---------------------------------------------------------------------------
# run_backtest
# ---------------------------------------------------------------------------

class TestRunBacktest:

    def test_starts_as_cash(self, universe) -> None:
        result = run_backtest(StrategyConfig(allocator="EW"), universe, START, END)
        assert result.values.iloc[0] == 1.0
        assert result.values.index[0] == pd.Timestamp(START)
        assert [r.date for r in result.records][:2] == [START, START + timedelta(days=7)]
        assert all(r.date.isoweekday() == 1 for r in result.records)

    def test_fee_is_rate_times_turnover(self, universe) -> None:
        config = StrategyConfig(allocator="MDP", filtered=True, policy="RW", seed=3)
        result = run_backtest(config, universe, START, END)
        for r in result.records:
            assert abs(r.fee - config.fee_rate * r.turnover) <= 1e-10
        assert result.records[-1].trades_cum == result.total_trades
        assert result.total_turnover > 0
        assert result.total_fees == pytest.approx(config.fee_rate * result.total_turnover, rel=1e-9)

    def test_rebalance_on_last_day_is_charged_but_not_valued(self, universe) -> None:
        assert END.isoweekday() == 1
        result = run_backtest(StrategyConfig(allocator="EW"), universe, START, END)
        last = result.records[-1]
        assert last.date == END and result.values.index[-1] == pd.Timestamp(END)
        assert last.fee > 0
        assert result.total_fees > sum(r.fee for r in result.records[:-1])
        carried = sum(u * universe[s].close_on(END) for s, u in result.records[-2].units.items())
        assert result.values.iloc[-1] == pytest.approx(carried, rel=1e-12)

    def test_values_follow_holdings_between_rebalances(self, universe) -> None:
        result = run_backtest(StrategyConfig(allocator="MVP"), universe, START, END)
        for r in result.records[:-1]:
            d = r.date + timedelta(days=3)
            expected = sum(u * universe[s].close_on(d) for s, u in r.units.items())
            assert result.values[pd.Timestamp(d)] == pytest.approx(expected, rel=1e-12)

    def test_filtered_equal_weight_holds_k(self, universe) -> None:
        result = run_backtest(StrategyConfig(allocator="EW", filtered=True, k=4, seed=1), universe, START, END)
        for r in result.records:
            assert len(r.weights) == 4
            assert set(r.weights.values()) == {0.25}
            assert set(r.weights) <= set(r.universe)
            assert sorted(set(r.clusters.values())) == [1, 2, 3, 4]

    def test_no_lookahead(self, universe) -> None:
        cut = date(2022, 4, 18)
        config = StrategyConfig(allocator="MDP", filtered=True, policy="FOT", seed=5)
        full = run_backtest(config, universe, START, END)
        partial = run_backtest(config, truncate(universe, cut), START, cut)
        kept = [r for r in full.records if r.date <= cut]
        assert len(kept) == len(partial.records)
        for a, b in zip(kept, partial.records):
            assert a.selected == b.selected
            assert a.weights == pytest.approx(b.weights, rel=1e-12, abs=1e-15)
        np.testing.assert_allclose(full.values[: pd.Timestamp(cut)], partial.values, rtol=1e-12)

    def test_single_asset_zero_fee_tracks_price(self, universe) -> None:
        streams = {"A00": universe["A00"]}
        result = run_backtest(StrategyConfig(allocator="EW", fee_rate=0.0), streams, START, END)
        closes = np.array([universe["A00"].close_on(ts.date()) for ts in result.values.index])
        np.testing.assert_allclose(result.values.to_numpy(), closes / closes[0], rtol=1e-12)

    @pytest.mark.parametrize(
        "config",
        [
            StrategyConfig(allocator="EW", fee_rate=0.0),
            StrategyConfig(allocator="MVP", fee_rate=0.0),
            StrategyConfig(allocator="MDP", fee_rate=0.0),
            StrategyConfig(allocator="EW", filtered=True, fee_rate=0.0),
            StrategyConfig(allocator="MDP", filtered=True, policy="RW", fee_rate=0.0),
        ],
        ids=lambda c: c.label,
    )
    def test_constant_prices(self, config) -> None:
        result = run_backtest(config, constant_universe(), START, date(2022, 4, 25))
        np.testing.assert_allclose(result.values.to_numpy(), 1.0, rtol=1e-12)
        assert all(r.trades == 0 for r in result.records[1:])
        assert all(r.weights == pytest.approx({f"C{i}": 0.25 for i in range(4)}) for r in result.records)

    def test_constant_prices_pay_the_entry_fee_once(self) -> None:
        f = 0.002
        config = StrategyConfig(allocator="EW", fee_rate=f)
        result = run_backtest(config, constant_universe(), START, date(2022, 4, 25))
        np.testing.assert_allclose(result.values.to_numpy()[1:], 1 / (1 + f), rtol=1e-12)
        assert result.total_fees == pytest.approx(f / (1 + f), rel=1e-12)

    def test_zero_volatility_falls_back(self) -> None:
        result = run_backtest(StrategyConfig(allocator="MDP"), constant_universe(), START, date(2022, 4, 25))
        assert all("zero volatility" in r.fallback for r in result.records)

    def test_filtered_trades_fewer_than_unfiltered(self, universe) -> None:
        plain = run_backtest(StrategyConfig(allocator="EW"), universe, START, END)
        filtered = run_backtest(StrategyConfig(allocator="EW", filtered=True, k=4, seed=2), universe, START, END)
        assert filtered.total_trades <= plain.total_trades
        assert all(r.trades <= 8 for r in filtered.records)

    def test_deterministic(self, universe) -> None:
        config = StrategyConfig(allocator="MVP", filtered=True, policy="RW", seed=9)
        a, b = run_backtest(config, universe, START, END), run_backtest(config, universe, START, END)
        assert np.array_equal(a.values.to_numpy(), b.values.to_numpy())
        assert a.records == b.records

    def test_late_listing_joins_universe(self, staggered_universe) -> None:
        config = StrategyConfig(allocator="EW", policy="RW")
        result = run_backtest(config, staggered_universe, START, date(2022, 9, 26))
        joined = [r.date for r in result.records if "A05" in r.universe]
        assert joined and joined[0] >= date(2022, 6, 15) + timedelta(days=30)
        assert all(r.weights.get("A05", 0.0) == 0.0 for r in result.records if r.date < joined[0])


# ---------------------------------------------------------------------------
# UniverseSelector
# ---------------------------------------------------------------------------

class TestUniverseSelector:

    def test_fot_features_match_full_window(self, universe) -> None:
        config = StrategyConfig(filtered=True, policy=WindowPolicy(kind="FOT", origin_date=date(2022, 1, 1)))
        selector = UniverseSelector(config, universe)
        for week in range(12):
            t = START + timedelta(days=7 * week)
            closes = [c for _, c in window_slice(universe["A04"], t, config.policy)]
            np.testing.assert_allclose(
                selector.features("A04", t).values, asset_features(closes).values, rtol=1e-10, atol=1e-12
            )

    def test_unfiltered_keeps_universe(self, universe) -> None:
        selected, selection = UniverseSelector(StrategyConfig(), universe).select(START, ["A01", "A02"])
        assert selected == ["A01", "A02"] and selection is None


# ---------------------------------------------------------------------------
# rebase_annually
# ---------------------------------------------------------------------------

class TestRebaseAnnually:

    def test_year_boundary(self) -> None:
        values = pd.Series([2.0, 4.0, 5.0, 10.0], index=pd.date_range("2022-12-30", periods=4, freq="D"))
        assert rebase_annually(values).tolist() == [1.0, 2.0, 1.0, 2.0]

    def test_constant(self) -> None:
        values = pd.Series(3.0, index=pd.date_range("2022-01-01", periods=500, freq="D"))
        assert (rebase_annually(values) == 1.0).all()

    def test_empty(self) -> None:
        with pytest.raises(BacktestError):
            rebase_annually(pd.Series([], dtype=float))
