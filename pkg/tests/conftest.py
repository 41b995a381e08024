"""
Shared synthetic market data: geometric random walks with known listing dates.
"""

import csv
import json
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
import pytest

from sigport.data import PriceStream

START = date(2022, 1, 1)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def make_stream(
    symbol: str,
    first: date,
    days: int,
    rng: np.random.Generator,
    sigma: float = 0.03,
    price: float = 100.0,
) -> PriceStream:
    steps = rng.normal(0.0, sigma, size=days - 1)
    closes = price * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))
    return PriceStream(
        symbol=symbol,
        dates=tuple(first + timedelta(days=i) for i in range(days)),
        closes=tuple(float(c) for c in closes),
    )


def make_universe(
    n: int = 10,
    days: int = 730,
    seed: int = 11,
    first: date = START,
    listings: Optional[Mapping[str, date]] = None,
) -> Dict[str, PriceStream]:
    """n assets named A00, A01, ... with volatilities spread over [0.01, 0.06]."""
    rng = np.random.default_rng(seed)
    end = first + timedelta(days=days - 1)
    listings = listings or dict()
    streams = dict()
    for i, sigma in enumerate(np.linspace(0.01, 0.06, n)):
        symbol = f"A{i:02d}"
        listed = listings.get(symbol, first)
        streams[symbol] = make_stream(symbol, listed, (end - listed).days + 1, rng, sigma=float(sigma))
    return streams


def constant_universe(n: int = 4, days: int = 120, first: date = START) -> Dict[str, PriceStream]:
    dates = tuple(first + timedelta(days=i) for i in range(days))
    return {
        f"C{i}": PriceStream(symbol=f"C{i}", dates=dates, closes=tuple([10.0 * (i + 1)] * days))
        for i in range(n)
    }


def truncate(streams: Mapping[str, PriceStream], last: date) -> Dict[str, PriceStream]:
    out = dict()
    for symbol, stream in streams.items():
        i, j = stream.span(stream.first_date, last)
        if j > i:
            out[symbol] = PriceStream(symbol=symbol, dates=stream.dates[i:j], closes=stream.closes[i:j])
    return out


def write_prices_csv(streams: Mapping[str, PriceStream], filepath: Path, skip: Sequence[tuple] = ()) -> Path:
    """Write `date,symbol,close`, rows by date then symbol; `skip` drops (symbol, date) pairs."""
    rows = [
        (d.isoformat(), s.symbol, repr(c))
        for s in streams.values()
        for d, c in s.observations
        if (s.symbol, d) not in skip
    ]
    with open(filepath, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["date", "symbol", "close"])
        writer.writerows(sorted(rows))
    return filepath


def write_config(filepath: Path, **config) -> Path:
    with open(filepath, "w") as f:
        json.dump(config, f, indent=2)
    return filepath


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def universe() -> Dict[str, PriceStream]:
    """10 assets, two years of daily closes from 2022-01-01."""
    return make_universe()


@pytest.fixture(scope="session")
def staggered_universe() -> Dict[str, PriceStream]:
    """6 assets; A04 listed on 2022-03-01 and A05 on 2022-06-15."""
    return make_universe(n=6, days=365, seed=5, listings={"A04": date(2022, 3, 1), "A05": date(2022, 6, 15)})


@pytest.fixture
def prices_csv(tmp_path: Path) -> Path:
    """12 assets over 200 days."""
    return write_prices_csv(make_universe(n=12, days=200, seed=3), tmp_path / "prices.csv")


@pytest.fixture
def run_config(tmp_path: Path, prices_csv: Path) -> Path:
    """Six strategies over the `prices_csv` universe, outputs in tmp_path/out."""
    return write_config(
        tmp_path / "config.json",
        data=prices_csv.name,
        output_dir="out",
        start="2022-02-07",
        end="2022-07-18",
        seed=7,
        k=4,
        strategies=[
            {"allocator": "EW"},
            {"allocator": "MVP"},
            {"allocator": "MDP"},
            {"allocator": "EW", "filtered": True, "policy": "FOT"},
            {"allocator": "MVP", "filtered": True, "policy": "FOT"},
            {"allocator": "MDP", "filtered": True, "policy": "RW"},
        ],
    )
