import logging
from datetime import date
from typing import List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..common import EligibilityError, OptimizationError
from ..data import PriceStream

logger = logging.getLogger(__name__)

DEFAULT_RIDGE = 1e-8
MIN_RETURN_ROWS = 15


class CovarianceEstimate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    symbols: List[str]
    matrix: np.ndarray
    vol: np.ndarray


# returns
def compute_returns(
    streams: Mapping[str, PriceStream], symbols: Sequence[str], window: Tuple[date, date]
) -> pd.DataFrame:
    """Daily simple returns over `window`, one column per symbol in the given order.

    The first date of the window is the basis, so a window of n closes yields n - 1 rows.

    Raises:
        EligibilityError: a symbol misses a close inside the window.
    """
    start, end = window
    columns = dict()
    for symbol in symbols:
        stream = streams[symbol]
        if not stream.is_complete(start, end):
            raise EligibilityError(
                f"'{symbol}' has missing closes in {start.isoformat()}..{end.isoformat()}", symbol, end
            )
        i, j = stream.span(start, end)
        closes = np.asarray(stream.closes[i:j], dtype=float)
        columns[symbol] = closes[1:] / closes[:-1] - 1.0
    index = pd.DatetimeIndex(pd.date_range(pd.Timestamp(start), pd.Timestamp(end), freq="D")[1:])
    return pd.DataFrame(columns, index=index, columns=list(symbols))


# covariance
def estimate_covariance(
    returns: pd.DataFrame, ridge: float = DEFAULT_RIDGE, min_rows: int = MIN_RETURN_ROWS
) -> CovarianceEstimate:
    """Population covariance plus ridge * (trace / n) on the diagonal."""
    if ridge < 0:
        raise OptimizationError(f"ridge must be >= 0, got {ridge}")
    if len(returns) < min_rows:
        raise OptimizationError(f"covariance needs at least {min_rows} return rows, got {len(returns)}")
    values = returns.to_numpy(dtype=float)
    matrix = np.atleast_2d(np.cov(values, rowvar=False, bias=True))
    matrix = (matrix + matrix.T) / 2.0
    n = matrix.shape[0]
    matrix = matrix + np.eye(n) * ridge * np.trace(matrix) / n
    vol = np.sqrt(np.clip(np.diag(matrix), 0.0, None))
    return CovarianceEstimate(symbols=list(returns.columns), matrix=matrix, vol=vol)
