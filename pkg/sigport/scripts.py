import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path

import click
from click_loglevel import LogLevel
from pydantic import ValidationError
from rich.console import Console
from tabulate import tabulate

from .backtest import StrategyConfig, UniverseSelector, run_backtest
from .common import CalendarError, ConfigError, PriceDataError
from .config import RunConfig, load_config, parse_date
from .data import build_calendar, inspect_prices, load_prices
from .logging import configure
from .signature import features_to_frame
from .utils import (
    SUMMARY_COLUMNS,
    cluster_frame,
    cluster_returns_frame,
    staging_dir,
    summary_frame,
    write_backtest_reports,
    write_frame,
)

logger = logging.getLogger(__name__)

# exit status 2, everything else that fails is 1
INPUT_ERRORS = (ValidationError, ConfigError, CalendarError, PriceDataError)
MAX_SEED = 2**64 - 1


################################################################
# Helpers
################################################################
def _abort(ex: Exception):
    code = 2 if isinstance(ex, INPUT_ERRORS) else 1
    logger.debug("command failed", exc_info=ex)
    Console(stderr=True, soft_wrap=True, highlight=False).print(f"error: {ex}", markup=False)
    sys.exit(code)


def _load(config_file: Path, seed=None) -> RunConfig:
    config = load_config(config_file)
    if seed is not None:
        config = config.with_seed(seed)
    return config


@click.group()
def sigport():
    pass


################################################################
# Backtest
################################################################
@sigport.command()
@click.option(
    "-c",
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Run Config (JSON).",
)
@click.option("--seed", type=click.IntRange(0, MAX_SEED), default=None, help="Overrides the config seed.")
@click.option("-w", "--workers", type=click.IntRange(min=1), default=1, help="Strategies run in parallel.")
@click.option("--log-level", type=LogLevel(), default=logging.INFO, help="Log Level.")
def backtest(config_file, seed, workers, log_level):
    # set log level
    configure(log_level)

    try:
        config = _load(config_file, seed)
        streams = load_prices(config.data)

        # run strategies, results keep config order
        run = partial(run_backtest, streams=streams, start=config.start, end=config.end)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run, config.strategies))

        # write reports
        with staging_dir(config.output_dir) as staging:
            write_backtest_reports(results, staging)
    except Exception as ex:
        _abort(ex)

    # print results
    summary = summary_frame(results)
    print(tabulate(summary.itertuples(index=False), headers=SUMMARY_COLUMNS, floatfmt=".4f"))
    print(f"{len(results)} strategies written to '{config.output_dir}'")


################################################################
# Clusters
################################################################
@sigport.command()
@click.option(
    "-c",
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Run Config (JSON).",
)
@click.option("-d", "--date", "rebalance_date", type=str, required=True, help="Rebalance date. Example: '2023-12-25'")
@click.option(
    "-p", "--policy", type=click.Choice(["fot", "rw"], case_sensitive=False), default="fot", help="Window policy."
)
@click.option("--seed", type=click.IntRange(0, MAX_SEED), default=None, help="Overrides the config seed.")
@click.option("--dump-features", is_flag=True, default=False, help="Also write the signature features.")
@click.option("--log-level", type=LogLevel(), default=logging.INFO, help="Log Level.")
def clusters(config_file, rebalance_date, policy, seed, dump_features, log_level):
    # set log level
    configure(log_level)

    try:
        config = _load(config_file, seed)
        try:
            t = parse_date(rebalance_date)
        except ValueError as ex:
            raise ConfigError(f"date: {ex}")
        window = config.policy(policy)
        streams = load_prices(config.data)
        calendar = build_calendar(streams, config.start, config.end, window)
        eligible = calendar.eligible_at(t)

        # same features, clusters and seed as the filtered backtest at t
        strategy = StrategyConfig(
            filtered=True,
            policy=window,
            k=config.k,
            signature_level=config.signature_level,
            seed=config.seed,
            ridge=config.ridge,
        )
        selector = UniverseSelector(strategy, streams)
        _, selection = selector.select(t, eligible)
        table = cluster_frame(selection)

        tag = f"{window.label}_{t.isoformat()}"
        with staging_dir(config.output_dir) as staging:
            write_frame(table, staging / f"clusters_{tag}.csv")
            write_frame(cluster_returns_frame(selection, streams, t, window), staging / f"cluster_returns_{tag}.csv")
            if dump_features:
                features = [selector.features(s, t) for s in eligible]
                write_frame(features_to_frame(features, level=config.signature_level), staging / f"features_{tag}.csv")
    except Exception as ex:
        _abort(ex)

    # print results
    print(f"clusters {tag}\n" + tabulate(table.itertuples(index=False), headers=list(table.columns), floatfmt=".4f"))
    print(f"representatives: {', '.join(selection.selected)}")


################################################################
# Validate
################################################################
@sigport.command()
@click.option(
    "-d",
    "--data",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Price CSV (date,symbol,close).",
)
@click.option("--log-level", type=LogLevel(), default=logging.INFO, help="Log Level.")
def validate(data, log_level):
    # set log level
    configure(log_level)

    try:
        coverages, issues = inspect_prices(data)
    except Exception as ex:
        _abort(ex)

    # print results
    table = [(c.symbol, c.first.isoformat(), c.last.isoformat(), c.observations, len(c.gaps)) for c in coverages]
    print(f"coverage of '{data}'\n" + tabulate(table, headers=["symbol", "first", "last", "observations", "gaps"]))
    for issue in issues:
        print(f"{issue.kind}: {issue.message}")
    print(f"{len(issues)} issues")

    if any(issue.structural for issue in issues):
        sys.exit(2)
