import logging
from datetime import date, timedelta
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from ..allocation import WeightVector, allocate, compute_returns, equal_weight, estimate_covariance
from ..clustering import ClusterSelection, cluster_assets
from ..common import BacktestError, OptimizationError
from ..data import PriceStream, build_calendar, price_frame, window_slice
from ..random import rng_for_date
from ..signature import FeatureVector, IncrementalSignature, asset_features
from .models import BacktestResult, Holdings, RebalanceRecord, StrategyConfig
from .rebalance import apply_rebalance

logger = logging.getLogger(__name__)


################################################################
# Universe Selection
################################################################
class UniverseSelector:
    """Target weights at a rebalance date: features, clusters, representatives, allocation.

    Under FOT the per-asset signatures are carried from one date to the next and only
    extended by the closes added since, since each window extends the previous one.
    """

    def __init__(self, config: StrategyConfig, streams: Mapping[str, PriceStream]):
        self.config = config
        self.streams = streams
        self._running: Dict[str, Tuple[date, date, IncrementalSignature]] = dict()

    def features(self, symbol: str, t: date) -> FeatureVector:
        stream, policy, level = self.streams[symbol], self.config.policy, self.config.signature_level
        if policy.kind == "RW":
            closes = [c for _, c in window_slice(stream, t, policy)]
            return asset_features(closes, level=level, symbol=symbol)

        start, _ = policy.bounds(stream, t)
        running = self._running.get(symbol)
        if running is None or running[0] != start or running[1] > t:
            closes = [c for _, c in window_slice(stream, t, policy)]
            running = (start, t, IncrementalSignature(level).extend(closes))
        else:
            closes = [c for _, c in stream.between(running[1] + timedelta(days=1), t)]
            running = (start, t, running[2].extend(closes))
        self._running[symbol] = running
        return running[2].features(symbol)

    def select(self, t: date, eligible: Sequence[str]) -> Tuple[List[str], Optional[ClusterSelection]]:
        if not self.config.filtered:
            return list(eligible), None
        features = [self.features(s, t) for s in eligible]
        selection = cluster_assets(features, k=self.config.k, seed=rng_for_date(self.config.seed, t))
        return selection.selected, selection

    def allocate(self, t: date, selected: Sequence[str]) -> Tuple[WeightVector, Optional[str]]:
        config = self.config
        if config.allocator == "EW":
            return equal_weight(selected), None

        starts = {s: config.policy.bounds(self.streams[s], t)[0] for s in selected}
        usable = [s for s in selected if (t - starts[s]).days >= config.min_returns]
        if not usable:
            reason = f"no asset with {config.min_returns} returns"
            logger.warning(f"{config.label} {t.isoformat()}: {reason}, equal weight fallback")
            return equal_weight(selected), reason

        # common window of the usable assets
        window = (max(starts[s] for s in usable), t)
        returns = compute_returns(self.streams, usable, window)
        try:
            cov = estimate_covariance(returns, ridge=config.ridge, min_rows=config.min_returns)
            return allocate(config.allocator, usable, cov), None
        except OptimizationError as ex:
            logger.warning(f"{config.label} {t.isoformat()}: {ex}, equal weight fallback")
            return equal_weight(selected), str(ex)


################################################################
# Backtest
################################################################
def run_backtest(config: StrategyConfig, streams: Mapping[str, PriceStream], start: date, end: date) -> BacktestResult:
    """Weekly rebalanced backtest of one strategy.

    Portfolio starts as 1.0 cash and is invested at the first rebalance date. The value
    recorded for a day marks the holdings carried into that day at its closes, before any
    rebalance of that day; holdings are left to drift between rebalances.

    A rebalance on the last priced day is still executed and recorded, so its trades and fee
    count towards `total_trades` and `total_fees`, but no later day exists to mark its value.
    """
    calendar = build_calendar(streams, start, end, config.policy)
    first = calendar.rebalance_dates[0]
    last = min(end, max(s.last_date for s in streams.values()))
    if last < first:
        raise BacktestError(f"no prices after the first rebalance date {first.isoformat()}")

    prices = price_frame(streams, first, last)
    rebalance_dates = set(calendar.rebalance_dates)
    selector = UniverseSelector(config, streams)

    holdings = Holdings()
    values, records, trades_cum = [], [], 0
    for ts, row in prices.iterrows():
        t = ts.date()
        values.append(holdings.value(row))
        if t not in rebalance_dates:
            continue

        eligible = calendar.eligible_at(t)
        selected, selection = selector.select(t, eligible)
        target, fallback = selector.allocate(t, selected)
        fill = apply_rebalance(holdings, target, row, config.fee_rate)
        trades_cum += fill.trades
        records.append(
            RebalanceRecord(
                date=t,
                universe=eligible,
                selected=list(selected),
                weights=target.weights,
                units=fill.holdings.units,
                sold=sorted(s for s in holdings.units if s not in fill.holdings.units),
                fee=fill.fee,
                turnover=fill.turnover,
                trades=fill.trades,
                trades_cum=trades_cum,
                clusters=selection.model.assignments if selection is not None and selection.model else None,
                fallback=fallback,
            )
        )
        holdings = fill.holdings
        logger.debug(f"{config.label} {t.isoformat()}: {len(target)} assets, {fill.trades} trades, fee {fill.fee:.3g}")

    series = pd.Series(values, index=prices.index, name=config.label, dtype=float)
    series.index.name = "date"
    logger.info(f"{config.label}: {len(records)} rebalances, final value {series.iloc[-1]:.6g}, {trades_cum} trades")

    return BacktestResult(strategy=config.label, config=config, values=series, records=records)
