import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..common import ClusteringError
from ..signature import FeatureVector

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-12


class Standardizer:
    """Per-coordinate z-scoring with population standard deviation.

    Coordinates whose deviation is below the floor are mapped to 0.
    """

    def __init__(self, mean: np.ndarray, std: np.ndarray, floor: float = STD_FLOOR):
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)
        self.floor = floor
        self.floored = self.std < floor

    @classmethod
    def fit(cls, points: np.ndarray, floor: float = STD_FLOOR) -> "Standardizer":
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 2:
            count = points.shape[0] if points.ndim else 0
            raise ClusteringError(f"standardizing needs at least 2 vectors, got {count}")
        return cls(points.mean(axis=0), points.std(axis=0), floor=floor)

    def transform(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        scale = np.where(self.floored, 1.0, self.std)
        z = (points - self.mean) / scale
        z[..., self.floored] = 0.0
        return z

    def inverse_transform(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z * np.where(self.floored, 0.0, self.std) + self.mean


# standardize
def standardize(features: Sequence[FeatureVector]) -> Tuple[Standardizer, List[FeatureVector]]:
    if len(features) < 2:
        raise ClusteringError(f"standardizing needs at least 2 feature vectors, got {len(features)}")
    points = np.vstack([fv.values for fv in features])
    scaler = Standardizer.fit(points)
    if scaler.floored.any():
        logger.debug(f"{int(scaler.floored.sum())} constant feature columns zeroed")
    z = scaler.transform(points)
    return scaler, [FeatureVector(symbol=fv.symbol, values=row) for fv, row in zip(features, z)]
