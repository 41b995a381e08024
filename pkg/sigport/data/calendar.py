import logging
from datetime import date, timedelta
from typing import Dict, List, Literal, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..common import CalendarError, EligibilityError
from .prices import PriceStream

logger = logging.getLogger(__name__)

REBALANCE_WEEKDAY = 1  # ISO Monday


################################################################
# Models
################################################################
class WindowPolicy(BaseModel):
    """Lookback window used at each rebalance date.

    FOT: expanding window from `origin_date` (or the asset's listing, whichever is later) to t,
    usable once it holds `min_history_days` daily observations. RW: the last `length_days` days up to t.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["FOT", "RW"] = "FOT"
    origin_date: Optional[date] = None
    length_days: int = 30
    min_history_days: int = 30

    @field_validator("kind", mode="before")
    @classmethod
    def _upper_kind(cls, v):
        return v.upper() if isinstance(v, str) else v

    @field_validator("length_days")
    @classmethod
    def _check_length(cls, v):
        if v < 2:
            raise ValueError(f"length_days must be >= 2, got {v}")
        return v

    @field_validator("min_history_days")
    @classmethod
    def _check_history(cls, v):
        if v < 1:
            raise ValueError(f"min_history_days must be >= 1, got {v}")
        return v

    @property
    def label(self) -> str:
        return self.kind.lower()

    def bounds(self, stream: PriceStream, t: date) -> Tuple[date, date]:
        """Window [start, t] this policy asks of `stream` at date t."""
        if self.kind == "RW":
            return t - timedelta(days=self.length_days), t
        start = stream.first_date
        if self.origin_date is not None and self.origin_date > start:
            start = self.origin_date
        return start, t

    def is_eligible(self, stream: PriceStream, t: date) -> bool:
        start, end = self.bounds(stream, t)
        if self.kind == "FOT" and (end - start).days + 1 < self.min_history_days:
            return False
        return stream.is_complete(start, end)


class UniverseCalendar(BaseModel):
    model_config = ConfigDict(frozen=True)

    policy: WindowPolicy
    rebalance_dates: Tuple[date, ...]
    eligible: Dict[date, Tuple[str, ...]]

    @model_validator(mode="after")
    def _check_dates(self):
        for d in self.rebalance_dates:
            if d.isoweekday() != REBALANCE_WEEKDAY:
                raise ValueError(f"rebalance date {d.isoformat()} is not a Monday")
        for prev, cur in zip(self.rebalance_dates, self.rebalance_dates[1:]):
            if (cur - prev).days != 7:
                raise ValueError(f"rebalance dates {prev.isoformat()} and {cur.isoformat()} are not 7 days apart")
        return self

    def eligible_at(self, t: date) -> Tuple[str, ...]:
        try:
            return self.eligible[t]
        except KeyError:
            raise CalendarError(f"{t.isoformat()} is not a rebalance date")


################################################################
# Functions
################################################################
def mondays(start: date, end: date) -> List[date]:
    first = start + timedelta(days=(REBALANCE_WEEKDAY - start.isoweekday()) % 7)
    return [first + timedelta(days=7 * i) for i in range(max(0, (end - first).days // 7 + 1))]


# build calendar
def build_calendar(
    streams: Mapping[str, PriceStream],
    start: date,
    end: date,
    policy: WindowPolicy,
) -> UniverseCalendar:
    """Weekly (Monday) rebalance dates in [start, end] with the symbols eligible at each.

    Raises:
        CalendarError: start >= end, no Monday in range, FOT origin after the first rebalance,
            or a rebalance date with no eligible symbol.
    """
    if start >= end:
        raise CalendarError(f"start ({start.isoformat()}) must be before end ({end.isoformat()})")

    dates = mondays(start, end)
    if not dates:
        raise CalendarError(f"no Monday between {start.isoformat()} and {end.isoformat()}")
    if policy.kind == "FOT" and policy.origin_date is not None and policy.origin_date > dates[0]:
        raise CalendarError(
            f"FOT origin {policy.origin_date.isoformat()} is after the first rebalance date {dates[0].isoformat()}"
        )

    eligible = dict()
    for t in dates:
        symbols = tuple(sorted(s for s, stream in streams.items() if policy.is_eligible(stream, t)))
        if not symbols:
            raise CalendarError(f"no eligible symbol on {t.isoformat()}")
        eligible[t] = symbols
        logger.debug(f"{t.isoformat()}: {len(symbols)} eligible symbols")

    return UniverseCalendar(policy=policy, rebalance_dates=tuple(dates), eligible=eligible)


# window slice
def window_slice(stream: PriceStream, t: date, policy: WindowPolicy) -> List[Tuple[date, float]]:
    """Observations of `stream` inside the policy window ending at t (both ends included)."""
    start, end = policy.bounds(stream, t)
    if not policy.is_eligible(stream, t):
        raise EligibilityError(
            f"'{stream.symbol}' is not eligible on {t.isoformat()}: window {start.isoformat()}..{end.isoformat()}"
            " is incomplete",
            stream.symbol,
            t,
        )
    return stream.between(start, end)
