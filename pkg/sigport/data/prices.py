import bisect
import logging
import math
from collections import defaultdict
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import pandas as pd
import pendulum
from pydantic import BaseModel, ConfigDict, model_validator

from ..common import EligibilityError, PriceDataError

logger = logging.getLogger(__name__)

COLUMNS = ["date", "symbol", "close"]
DATE_FORMAT = "YYYY-MM-DD"


################################################################
# Models
################################################################
class PriceStream(BaseModel):
    """Daily closes of one asset, dates strictly increasing."""

    model_config = ConfigDict(frozen=True)

    symbol: str
    dates: Tuple[date, ...]
    closes: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_observations(self):
        if len(self.dates) != len(self.closes):
            raise ValueError(f"'{self.symbol}': {len(self.dates)} dates but {len(self.closes)} closes")
        if not self.dates:
            raise ValueError(f"'{self.symbol}': no observations")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise ValueError(f"'{self.symbol}': dates not strictly increasing at {cur.isoformat()}")
        for d, c in zip(self.dates, self.closes):
            if not math.isfinite(c) or c <= 0:
                raise ValueError(f"'{self.symbol}': non-positive price {c} on {d.isoformat()}")
        return self

    @property
    def first_date(self) -> date:
        return self.dates[0]

    @property
    def last_date(self) -> date:
        return self.dates[-1]

    @property
    def observations(self) -> List[Tuple[date, float]]:
        return list(zip(self.dates, self.closes))

    def __len__(self):
        return len(self.dates)

    def span(self, start: date, end: date) -> Tuple[int, int]:
        """Positions [i, j) of the observations dated within [start, end]."""
        return bisect.bisect_left(self.dates, start), bisect.bisect_right(self.dates, end)

    def is_complete(self, start: date, end: date) -> bool:
        """True when every calendar day of [start, end] has a close."""
        i, j = self.span(start, end)
        if j <= i:
            return False
        return self.dates[i] == start and self.dates[j - 1] == end and (end - start).days == j - i - 1

    def between(self, start: date, end: date) -> List[Tuple[date, float]]:
        i, j = self.span(start, end)
        return list(zip(self.dates[i:j], self.closes[i:j]))

    def close_on(self, _date: date) -> float:
        i = bisect.bisect_left(self.dates, _date)
        if i == len(self.dates) or self.dates[i] != _date:
            raise EligibilityError(f"'{self.symbol}' has no close on {_date.isoformat()}", self.symbol, _date)
        return self.closes[i]

    def to_series(self) -> pd.Series:
        return pd.Series(self.closes, index=pd.DatetimeIndex(self.dates), name=self.symbol, dtype=float)


class PriceIssue(BaseModel):
    kind: str
    message: str
    symbol: Optional[str] = None
    line: Optional[int] = None
    structural: bool = True


class Coverage(BaseModel):
    symbol: str
    first: date
    last: date
    observations: int
    gaps: List[Tuple[date, date]] = []


################################################################
# Parsing Helpers
################################################################
# rows with extra fields are kept, their close replaced by a marker carrying the field count
_EXTRA_FIELDS = "\x00extra:"


def _mark_extra_fields(fields: List[str]) -> List[str]:
    return [fields[0], fields[1], f"{_EXTRA_FIELDS}{len(fields)}"]


def _extra_fields(raw: str) -> Optional[int]:
    return int(raw[len(_EXTRA_FIELDS) :]) if raw.startswith(_EXTRA_FIELDS) else None


def _read_rows(source: Union[str, Path]) -> pd.DataFrame:
    try:
        # header read as a plain row, so a long first data row is never taken for an index column
        frame = pd.read_csv(
            source,
            header=None,
            names=COLUMNS,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
            engine="python",
            on_bad_lines=_mark_extra_fields,
        )
    except pd.errors.EmptyDataError:
        raise PriceDataError(f"empty price file '{source}'")
    except pd.errors.ParserError as ex:
        raise PriceDataError(f"unreadable price file '{source}': {ex}")
    if frame.empty:
        raise PriceDataError(f"empty price file '{source}'")
    expected = ",".join(COLUMNS)
    if not isinstance(frame.index, pd.RangeIndex):
        # a header wider than three columns turns the first column into an index
        raise PriceDataError(f"expected header '{expected}', got more than {len(COLUMNS)} columns", line=1)

    frame = frame.fillna("")
    header = [str(c).strip().lower() for c in frame.iloc[0]]
    if header != COLUMNS:
        raise PriceDataError(f"expected header '{expected}', got '{','.join(frame.iloc[0])}'", line=1)
    frame = frame.iloc[1:].reset_index(drop=True)
    if frame.empty:
        raise PriceDataError(f"empty price file '{source}'")
    return frame


def _parse_rows(frame: pd.DataFrame) -> Iterator[Tuple[int, Optional[tuple], Optional[PriceIssue]]]:
    """Yield (line, (date, symbol, close), None) for good rows and (line, None, issue) for bad ones."""
    date_cache: Dict[str, date] = dict()
    for i, (raw_date, symbol, raw_close) in enumerate(frame[COLUMNS].itertuples(index=False, name=None)):
        line = i + 2  # header is line 1
        fields = _extra_fields(raw_close)
        if fields is not None:
            msg = f"expected {len(COLUMNS)} fields, got {fields} at line {line}"
            yield line, None, PriceIssue(kind="malformed", message=msg, symbol=symbol.strip() or None, line=line)
            continue
        symbol = symbol.strip()
        if not symbol:
            yield line, None, PriceIssue(kind="malformed", message=f"empty symbol at line {line}", line=line)
            continue

        raw_date = raw_date.strip()
        _date = date_cache.get(raw_date)
        if _date is None:
            try:
                parsed = pendulum.from_format(raw_date, DATE_FORMAT)
                _date = date(parsed.year, parsed.month, parsed.day)
            except ValueError:
                msg = f"malformed date '{raw_date}' at line {line}"
                yield line, None, PriceIssue(kind="malformed", message=msg, symbol=symbol, line=line)
                continue
            date_cache[raw_date] = _date

        try:
            close = float(raw_close)
        except ValueError:
            msg = f"non-numeric price '{raw_close}' at line {line}"
            yield line, None, PriceIssue(kind="malformed", message=msg, symbol=symbol, line=line)
            continue
        if not math.isfinite(close):
            msg = f"non-numeric price '{raw_close}' at line {line}"
            yield line, None, PriceIssue(kind="malformed", message=msg, symbol=symbol, line=line)
            continue
        if close <= 0:
            msg = f"non-positive price at line {line}"
            yield line, None, PriceIssue(kind="non_positive", message=msg, symbol=symbol, line=line)
            continue

        yield line, (_date, symbol, close), None


def _missing_ranges(dates: List[date]) -> List[Tuple[date, date]]:
    gaps = []
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days > 1:
            gaps.append((prev + timedelta(days=1), cur - timedelta(days=1)))
    return gaps


################################################################
# Functions
################################################################
# load prices
def load_prices(source: Union[str, Path]) -> Dict[str, PriceStream]:
    """Read a `date,symbol,close` CSV into one PriceStream per symbol.

    Args:
        source (str | Path): CSV file, UTF-8, ISO dates.

    Returns:
        dict: symbol -> PriceStream, symbols in sorted order, each stream sorted by date.

    Raises:
        PriceDataError: on the first malformed, non-positive or duplicate row, or an empty file.
    """
    frame = _read_rows(source)

    rows: Dict[str, Dict[date, float]] = defaultdict(dict)
    for line, row, issue in _parse_rows(frame):
        if issue is not None:
            raise PriceDataError(issue.message.rsplit(" at line", 1)[0], line=line)
        _date, symbol, close = row
        if _date in rows[symbol]:
            raise PriceDataError(f"duplicate ({symbol}, {_date.isoformat()})", line=line)
        rows[symbol][_date] = close

    streams = dict()
    for symbol in sorted(rows):
        observations = sorted(rows[symbol].items())
        streams[symbol] = PriceStream(
            symbol=symbol,
            dates=tuple(d for d, _ in observations),
            closes=tuple(c for _, c in observations),
        )
    logger.info(f"loaded {len(frame)} rows, {len(streams)} symbols from '{source}'")

    return streams


# inspect prices
def inspect_prices(source: Union[str, Path]) -> Tuple[List[Coverage], List[PriceIssue]]:
    """Collect coverage and every issue of a price file without stopping at the first one.

    Gaps are reported as non-structural issues, everything else is structural.
    """
    try:
        frame = _read_rows(source)
    except PriceDataError as ex:
        kind = "empty" if "empty" in str(ex) else "header" if ex.line == 1 else "malformed"
        return [], [PriceIssue(kind=kind, message=str(ex), line=ex.line)]

    issues = []
    rows: Dict[str, Dict[date, float]] = defaultdict(dict)
    for line, row, issue in _parse_rows(frame):
        if issue is not None:
            issues.append(issue)
            continue
        _date, symbol, close = row
        if _date in rows[symbol]:
            msg = f"duplicate ({symbol}, {_date.isoformat()}) at line {line}"
            issues.append(PriceIssue(kind="duplicate", message=msg, symbol=symbol, line=line))
            continue
        rows[symbol][_date] = close

    coverages = []
    for symbol in sorted(rows):
        dates = sorted(rows[symbol])
        gaps = _missing_ranges(dates)
        for first, last in gaps:
            msg = f"gap in '{symbol}' from {first.isoformat()} to {last.isoformat()}"
            issues.append(PriceIssue(kind="gap", message=msg, symbol=symbol, structural=False))
        coverages.append(
            Coverage(symbol=symbol, first=dates[0], last=dates[-1], observations=len(dates), gaps=gaps)
        )

    return coverages, issues


# aligned price frame
def price_frame(streams: Dict[str, PriceStream], start: date, end: date) -> pd.DataFrame:
    """Daily closes over [start, end], one column per symbol, forward-filled for valuation."""
    index = pd.date_range(pd.Timestamp(start), pd.Timestamp(end), freq="D")
    frame = pd.concat([s.to_series() for s in streams.values()], axis=1) if streams else pd.DataFrame()
    frame = frame.reindex(frame.index.union(index)).sort_index().ffill()
    return frame.reindex(index)
