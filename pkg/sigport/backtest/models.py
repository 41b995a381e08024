import datetime
import logging
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from ..allocation.portfolios import Allocator
from ..allocation.returns import DEFAULT_RIDGE, MIN_RETURN_ROWS
from ..common import BacktestError
from ..data import WindowPolicy
from ..metrics import MetricSummary, summarize

logger = logging.getLogger(__name__)

DEFAULT_FEE_RATE = 0.0020
MAX_FEE_RATE = 0.01


################################################################
# Strategy
################################################################
class StrategyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: Optional[str] = None
    allocator: Allocator = "EW"
    filtered: bool = False
    policy: WindowPolicy = WindowPolicy()
    k: int = 4
    signature_level: int = 4
    fee_rate: float = DEFAULT_FEE_RATE
    seed: int = 0
    ridge: float = DEFAULT_RIDGE
    min_returns: int = MIN_RETURN_ROWS

    @field_validator("allocator", mode="before")
    @classmethod
    def _upper_allocator(cls, v):
        return v.upper() if isinstance(v, str) else v

    @field_validator("policy", mode="before")
    @classmethod
    def _policy_shorthand(cls, v):
        # "fot" / "rw"
        return {"kind": v} if isinstance(v, str) else v

    @field_validator("fee_rate")
    @classmethod
    def _check_fee_rate(cls, v):
        if not 0.0 <= v <= MAX_FEE_RATE:
            raise ValueError(f"fee_rate must be in [0, {MAX_FEE_RATE}], got {v}")
        return v

    @field_validator("k", "signature_level", "min_returns")
    @classmethod
    def _check_positive(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {v}")
        return v

    @field_validator("ridge")
    @classmethod
    def _check_ridge(cls, v):
        if v < 0:
            raise ValueError(f"ridge must be >= 0, got {v}")
        return v

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.filtered:
            return f"PORTFOLIO_SIG_CLUSTER_{self.allocator}_{self.policy.kind}"
        return f"PORTFOLIO_{self.allocator}" + ("_RW" if self.policy.kind == "RW" else "")


################################################################
# Portfolio State
################################################################
class Holdings(BaseModel):
    model_config = ConfigDict(frozen=True)

    units: Dict[str, float] = {}
    cash: float = 1.0

    @field_validator("cash")
    @classmethod
    def _check_cash(cls, v):
        if v < 0:
            raise ValueError(f"cash must be >= 0, got {v}")
        return v

    @field_validator("units")
    @classmethod
    def _check_units(cls, v):
        negative = {s: u for s, u in v.items() if u < 0}
        if negative:
            raise ValueError(f"negative units {negative}")
        return v

    def value(self, prices: Mapping[str, float]) -> float:
        value = self.cash + sum(u * prices[s] for s, u in self.units.items())
        if not value > 0:
            raise BacktestError(f"portfolio value {value} is not positive")
        return value

    def weights(self, prices: Mapping[str, float]) -> Dict[str, float]:
        value = self.value(prices)
        return {s: u * prices[s] / value for s, u in self.units.items()}


class RebalanceRecord(BaseModel):
    date: datetime.date
    universe: Tuple[str, ...]
    selected: List[str]
    weights: Dict[str, float]
    units: Dict[str, float]
    sold: List[str] = []
    fee: float
    turnover: float
    trades: int
    trades_cum: int
    clusters: Optional[Dict[str, int]] = None
    fallback: Optional[str] = None


class BacktestResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    strategy: str
    config: StrategyConfig
    values: pd.Series
    records: List[RebalanceRecord]

    @property
    def total_trades(self) -> int:
        return sum(r.trades for r in self.records)

    @property
    def total_fees(self) -> float:
        return sum(r.fee for r in self.records)

    @property
    def total_turnover(self) -> float:
        return sum(r.turnover for r in self.records)

    def summary(self) -> MetricSummary:
        return summarize(self.values)
