import logging
import math
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from ..common import SignatureError
from .tensor import Signature, Word, _extend, iter_words, path_signature, render_word
from .transforms import lead_lag_transform, log_rebase

logger = logging.getLogger(__name__)

DEFAULT_LEVEL = 4
LEAD_LAG_DIMENSION = 2


################################################################
# Models
################################################################
class FeatureVector(NamedTuple):
    symbol: Optional[str]
    values: np.ndarray


################################################################
# Functions
################################################################
def feature_words(level: int = DEFAULT_LEVEL, dimension: int = LEAD_LAG_DIMENSION) -> List[Word]:
    """Words of the flattened features, constant term excluded."""
    return list(iter_words(dimension, level))[1:]


# asset features
def asset_features(closes: Sequence[float], level: int = DEFAULT_LEVEL, symbol: Optional[str] = None) -> FeatureVector:
    """Flattened level-1..K signature of the lead-lag path of log-rebased closes."""
    path = lead_lag_transform(log_rebase(closes))
    signature = path_signature(path, level)
    return FeatureVector(symbol=symbol, values=signature.flatten())


def features_to_frame(features: Iterable[FeatureVector], level: int = DEFAULT_LEVEL) -> pd.DataFrame:
    """Long `symbol,word,value` table, word rendered as dot-joined letters."""
    words = [render_word(w) for w in feature_words(level)]
    rows = []
    for fv in features:
        if len(fv.values) != len(words):
            raise SignatureError(
                f"'{fv.symbol}' has {len(fv.values)} features, expected {len(words)} for level {level}"
            )
        rows += [(fv.symbol, w, float(v)) for w, v in zip(words, fv.values)]
    return pd.DataFrame(rows, columns=["symbol", "word", "value"])


################################################################
# Incremental Signature
################################################################
class IncrementalSignature:
    """Running lead-lag signature of a growing price window.

    Extending by new closes equals recomputing `asset_features` over the whole window:
    the lead-lag path of the longer stream starts with the lead-lag path of the shorter one,
    and the log rebase only translates the path.
    """

    def __init__(self, level: int = DEFAULT_LEVEL):
        if level < 1:
            raise SignatureError(f"level must be >= 1, got {level}")
        self.level = level
        self.count = 0
        self._base = None
        self._last = None
        self._levels = list(Signature.identity(LEAD_LAG_DIMENSION, level).levels)

    def extend(self, closes: Sequence[float]) -> "IncrementalSignature":
        for close in closes:
            if not math.isfinite(close) or close <= 0:
                raise SignatureError(f"non-positive price {close}")
            if self._base is None:
                self._base = math.log(close)
                self._last = 0.0
                self.count = 1
                continue
            x = math.log(close) - self._base
            step = x - self._last
            self._levels = _extend(self._levels, np.array([step, 0.0]), self.level)
            self._levels = _extend(self._levels, np.array([0.0, step]), self.level)
            self._last = x
            self.count += 1
        return self

    @property
    def signature(self) -> Signature:
        return Signature(self._levels, LEAD_LAG_DIMENSION, self.level)

    def features(self, symbol: Optional[str] = None) -> FeatureVector:
        return FeatureVector(symbol=symbol, values=self.signature.flatten())
