import logging
import math
import os
import re
import shutil
import tempfile
from contextlib import contextmanager
from datetime import date
from pathlib import Path
from typing import List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from .backtest import BacktestResult, rebase_annually
from .clustering import ClusterSelection, project_2d
from .common import MetricsError
from .data import PriceStream, WindowPolicy, window_slice
from .metrics import MetricSummary

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["strategy", "ann_return", "ann_vol", "sharpe", "calmar", "mdd", "total_trades", "total_fees"]
REBALANCE_COLUMNS = ["date", "symbol", "weight", "units", "fee", "trades_cum"]
WEIGHT_COLUMNS = ["date", "symbol", "weight", "strategy"]
CLUSTER_COLUMNS = ["symbol", "cluster", "pc1", "pc2", "is_representative"]
CLUSTER_RETURN_COLUMNS = ["date", "symbol", "cluster", "log_return"]


################################################################
# Helpers
################################################################
def safe_name(name: str) -> str:
    """File-name friendly strategy label."""
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def write_frame(frame: pd.DataFrame, filename: Union[str, Path]) -> Path:
    """Write a report CSV. Same frame, same bytes."""
    filename = Path(filename)
    frame.to_csv(filename, index=False, lineterminator="\n", encoding="utf-8")
    logger.debug(f"wrote {len(frame)} rows to '{filename}'")
    return filename


@contextmanager
def staging_dir(output_dir: Union[str, Path]):
    """Yield a scratch directory next to `output_dir`; its files move into `output_dir` on success.

    Nothing reaches `output_dir` when the block raises.
    """
    output_dir = Path(output_dir)
    output_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".sigport-", dir=output_dir.parent))
    try:
        yield staging
        output_dir.mkdir(parents=True, exist_ok=True)
        for f in sorted(staging.iterdir()):
            os.replace(f, output_dir / f.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def _series_frame(values: pd.Series) -> pd.DataFrame:
    return pd.DataFrame({"date": [ts.date().isoformat() for ts in values.index], "value": values.to_numpy()})


################################################################
# Backtest Reports
################################################################
def values_frame(result: BacktestResult, rebased: bool = False) -> pd.DataFrame:
    values = rebase_annually(result.values) if rebased else result.values
    return _series_frame(values)


def rebalance_frame(result: BacktestResult) -> pd.DataFrame:
    """One row per (rebalance, symbol) held after or sold at the rebalance; sold symbols get weight 0."""
    rows = []
    for r in result.records:
        for symbol in sorted(set(r.weights) | set(r.sold)):
            rows.append(
                (
                    r.date.isoformat(),
                    symbol,
                    r.weights.get(symbol, 0.0),
                    r.units.get(symbol, 0.0),
                    r.fee,
                    r.trades_cum,
                )
            )
    return pd.DataFrame(rows, columns=REBALANCE_COLUMNS)


def fallback_frame(result: BacktestResult) -> pd.DataFrame:
    rows = [(r.date.isoformat(), r.fallback) for r in result.records if r.fallback]
    return pd.DataFrame(rows, columns=["date", "reason"])


def weights_frame(results: Sequence[BacktestResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        for r in result.records:
            rows += [(r.date.isoformat(), s, w, result.strategy) for s, w in sorted(r.weights.items())]
    return pd.DataFrame(rows, columns=WEIGHT_COLUMNS)


def summary_frame(results: Sequence[BacktestResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        try:
            m = result.summary()
        except MetricsError as ex:
            # too few days to annualize
            logger.warning(f"'{result.strategy}': {ex}, metrics left empty")
            nan = math.nan
            m = MetricSummary(annualized_return=nan, annualized_volatility=nan, sharpe=nan, calmar=nan, mdd=nan)
        rows.append(
            (
                result.strategy,
                m.annualized_return,
                m.annualized_volatility,
                m.sharpe,
                m.calmar,
                m.mdd,
                result.total_trades,
                result.total_fees,
            )
        )
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


# write backtest reports
def write_backtest_reports(results: Sequence[BacktestResult], directory: Union[str, Path]) -> List[Path]:
    """Per strategy values, rebased values, rebalances and fallbacks; then weights.csv and summary.csv.

    Args:
        results (list): backtest results, in config order.
        directory (str | Path): existing directory to write into.

    Returns:
        list: written files.
    """
    directory = Path(directory)
    written = []
    for result in results:
        name = safe_name(result.strategy)
        written.append(write_frame(values_frame(result), directory / f"values_{name}.csv"))
        written.append(write_frame(values_frame(result, rebased=True), directory / f"values_rebased_{name}.csv"))
        written.append(write_frame(rebalance_frame(result), directory / f"rebalances_{name}.csv"))
        fallbacks = fallback_frame(result)
        if not fallbacks.empty:
            written.append(write_frame(fallbacks, directory / f"fallbacks_{name}.csv"))
    written.append(write_frame(weights_frame(results), directory / "weights.csv"))
    written.append(write_frame(summary_frame(results), directory / "summary.csv"))
    return written


################################################################
# Cluster Reports
################################################################
def cluster_frame(selection: ClusterSelection) -> pd.DataFrame:
    """`symbol,cluster,pc1,pc2,is_representative`, clusters 1-based, rows in symbol order."""
    if selection.points is not None:
        coordinates = project_2d(selection.points)
        labels = selection.model.assignments
    else:
        coordinates = np.zeros((len(selection.symbols), 2))
        labels = {s: 1 for s in selection.symbols}
    representatives = set(selection.representatives.values())

    rows = [
        (symbol, labels[symbol], float(xy[0]), float(xy[1]), symbol in representatives)
        for symbol, xy in zip(selection.symbols, coordinates)
    ]
    return pd.DataFrame(sorted(rows), columns=CLUSTER_COLUMNS)


def cluster_returns_frame(
    selection: ClusterSelection,
    streams: Mapping[str, PriceStream],
    t: date,
    policy: WindowPolicy,
) -> pd.DataFrame:
    """Daily log returns of every clustered asset over its window at t, tagged with its cluster."""
    labels = selection.model.assignments if selection.model is not None else {s: 1 for s in selection.symbols}
    rows = []
    for symbol in sorted(selection.symbols):
        observations = window_slice(streams[symbol], t, policy)
        for (_, prev), (d, close) in zip(observations, observations[1:]):
            rows.append((d.isoformat(), symbol, labels[symbol], math.log(close / prev)))
    return pd.DataFrame(rows, columns=CLUSTER_RETURN_COLUMNS)
