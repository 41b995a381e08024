import logging

import pandas as pd

from ..common import BacktestError

logger = logging.getLogger(__name__)


# rebase annually
def rebase_annually(values: pd.Series) -> pd.Series:
    """Divide each calendar year of a dated series by its value on the year's first date."""
    if values.empty:
        raise BacktestError("cannot rebase an empty series")
    index = pd.DatetimeIndex(values.index)
    years = pd.Series(index.year, index=values.index)
    firsts = values.groupby(years).transform("first")
    return values / firsts
