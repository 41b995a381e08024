import hashlib
import logging
from datetime import date, datetime
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)


def rng_for_date(seed: int, _date: Union[str, date, datetime]) -> np.random.Generator:
    """Reproducible generator for one rebalance date.

    The stream depends only on (seed, date), so a run over truncated data draws the same
    numbers at every date it shares with the full run.
    """
    if isinstance(_date, str):
        _date = date.fromisoformat(_date)
    _date = _date.strftime("%Y%m%d")
    digest = hashlib.sha256(f"{int(seed)}:{_date}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))
