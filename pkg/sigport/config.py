import json
import logging
from datetime import date
from pathlib import Path
from typing import List, Optional, Union

import pendulum
from pydantic import BaseModel, ValidationError, field_validator, model_validator

from .backtest import StrategyConfig
from .backtest.models import DEFAULT_FEE_RATE
from .common import ConfigError
from .data import WindowPolicy

logger = logging.getLogger(__name__)

# run-level keys a strategy inherits when it does not set them
INHERITED = ("k", "signature_level", "fee_rate", "seed", "ridge")


################################################################
# Helpers
################################################################
def parse_date(value: Union[str, date]) -> date:
    if isinstance(value, date):
        return date(value.year, value.month, value.day)
    try:
        parsed = pendulum.from_format(str(value).strip(), "YYYY-MM-DD")
    except ValueError:
        raise ValueError(f"expected a YYYY-MM-DD date, got '{value}'")
    return date(parsed.year, parsed.month, parsed.day)


################################################################
# Models
################################################################
class RunConfig(BaseModel):
    """Run configuration, loaded from JSON.

    Example
    -------
    >>> {
    ...     "data": "prices.csv",
    ...     "output_dir": "out",
    ...     "start": "2022-01-03",
    ...     "end": "2023-12-25",
    ...     "seed": 7,
    ...     "strategies": [
    ...         {"allocator": "EW"},
    ...         {"allocator": "EW", "filtered": true, "policy": "FOT"},
    ...         {"allocator": "MDP", "filtered": true, "policy": {"kind": "RW", "length_days": 30}}
    ...     ]
    ... }
    """

    data: Path
    output_dir: Path = Path("output")
    start: date
    end: date
    seed: int = 0
    k: int = 4
    signature_level: int = 4
    fee_rate: float = DEFAULT_FEE_RATE
    ridge: float = 1e-8
    window_days: int = 30
    origin: Optional[date] = None
    strategies: List[StrategyConfig]

    @field_validator("start", "end", "origin", mode="before")
    @classmethod
    def _parse_dates(cls, v):
        return v if v is None else parse_date(v)

    @model_validator(mode="before")
    @classmethod
    def _inherit_defaults(cls, values):
        if not isinstance(values, dict):
            return values
        strategies = []
        for strategy in values.get("strategies") or []:
            if not isinstance(strategy, dict):
                strategies.append(strategy)
                continue
            strategy = dict(strategy)
            for key in INHERITED:
                if key not in strategy and key in values:
                    strategy[key] = values[key]
            policy = strategy.get("policy", "FOT")
            policy = {"kind": policy} if isinstance(policy, str) else dict(policy)
            if "length_days" not in policy and "window_days" in values:
                policy["length_days"] = values["window_days"]
            if "origin_date" not in policy and values.get("origin") is not None:
                policy["origin_date"] = values["origin"]
            strategy["policy"] = policy
            strategies.append(strategy)
        return {**values, "strategies": strategies}

    @model_validator(mode="after")
    def _check_run(self):
        if self.start >= self.end:
            raise ValueError(f"end: must be after start (start={self.start.isoformat()}, end={self.end.isoformat()})")
        if not self.strategies:
            raise ValueError("strategies: at least one strategy is required")
        labels = [s.label for s in self.strategies]
        duplicates = sorted({x for x in labels if labels.count(x) > 1})
        if duplicates:
            raise ValueError(f"strategies: duplicate strategy names {duplicates}")
        return self

    def policy(self, kind: str) -> WindowPolicy:
        return WindowPolicy(kind=kind, length_days=self.window_days, origin_date=self.origin)

    def with_seed(self, seed: int) -> "RunConfig":
        strategies = [s.model_copy(update={"seed": seed}) for s in self.strategies]
        return self.model_copy(update={"seed": seed, "strategies": strategies})


################################################################
# Functions
################################################################
def load_config(filename: Union[str, Path]) -> RunConfig:
    """Read a JSON run config; `data` and `output_dir` are relative to the file.

    Raises:
        ConfigError: unreadable JSON or a field failing validation, message names the field.
    """
    filename = Path(filename)
    try:
        with open(filename, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as ex:
        raise ConfigError(f"config '{filename}' is not valid JSON: {ex}")

    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as ex:
        errors = "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'config'}: {err['msg']}" for err in ex.errors()
        )
        raise ConfigError(f"invalid config '{filename}': {errors}")

    base = filename.resolve().parent
    return config.model_copy(
        update={
            "data": config.data if config.data.is_absolute() else base / config.data,
            "output_dir": config.output_dir if config.output_dir.is_absolute() else base / config.output_dir,
        }
    )
