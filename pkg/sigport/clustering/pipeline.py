import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..common import ClusteringError
from ..signature import FeatureVector
from .kmeans import DEFAULT_MAX_ITER, DEFAULT_TOL, ClusterModel, kmeans_fit, select_representatives
from .standardize import standardize

logger = logging.getLogger(__name__)


class ClusterSelection(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    symbols: List[str]
    model: Optional[ClusterModel] = None
    points: Optional[np.ndarray] = None
    representatives: Dict[int, str]

    @property
    def selected(self) -> List[str]:
        return sorted(self.representatives.values())


def cluster_assets(
    features: Sequence[FeatureVector],
    k: int,
    seed: Union[int, np.random.Generator] = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> ClusterSelection:
    """Standardize, cluster and keep one representative per cluster.

    With fewer assets than k every asset is its own cluster; a single asset is kept as is.
    """
    if not features:
        raise ClusteringError("no assets to cluster")
    symbols = [fv.symbol for fv in features]
    if len(features) == 1:
        return ClusterSelection(symbols=symbols, representatives={1: symbols[0]})

    if k > len(features):
        logger.warning(f"only {len(features)} assets for k={k}, clustering with k={len(features)}")
        k = len(features)
    _, standardized = standardize(features)
    points = np.vstack([fv.values for fv in standardized])
    model = kmeans_fit(points, k=k, seed=seed, max_iter=max_iter, tol=tol, symbols=symbols)
    representatives = select_representatives(model, points)

    return ClusterSelection(symbols=symbols, model=model, points=points, representatives=representatives)
