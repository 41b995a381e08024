from . import engine, models, rebalance, series
from .engine import UniverseSelector, run_backtest
from .models import BacktestResult, Holdings, RebalanceRecord, StrategyConfig
from .rebalance import Fill, apply_rebalance
from .series import rebase_annually

__all__ = ["engine", "models", "rebalance", "series"]
