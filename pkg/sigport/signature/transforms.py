import logging
from typing import Sequence

import numpy as np

from ..common import SignatureError

logger = logging.getLogger(__name__)


# lead-lag transform
def lead_lag_transform(values: Sequence[float]) -> np.ndarray:
    """Lead-lag path of a 1-d stream X_0..X_N, shape (2N + 1, 2).

    Point 2i is (X_i, X_i) and point 2i + 1 is (X_{i+1}, X_i): the lead channel moves first,
    the lag channel catches up on the next point.
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise SignatureError("lead-lag transform of an empty stream")
    lead = np.repeat(x, 2)[1:]
    lag = np.repeat(x, 2)[:-1]
    return np.column_stack([lead, lag])


# log rebase
def log_rebase(window: Sequence[float]) -> np.ndarray:
    """ln(close_i) - ln(close_0)."""
    closes = np.asarray(window, dtype=float).ravel()
    if closes.size == 0:
        raise SignatureError("log rebase of an empty window")
    if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
        raise SignatureError("non-positive price in window")
    logs = np.log(closes)
    return logs - logs[0]
