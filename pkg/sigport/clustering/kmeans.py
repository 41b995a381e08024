import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..common import ClusteringError

logger = logging.getLogger(__name__)

DEFAULT_K = 4
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-8


################################################################
# Models
################################################################
class ClusterModel(BaseModel):
    """Fitted k-means model. `labels` are 0-based, `assignments` are 1-based."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k: int
    symbols: List[str]
    centroids: np.ndarray
    labels: np.ndarray
    iterations_run: int
    final_loss: float
    loss_history: List[float]

    @property
    def assignments(self) -> Dict[str, int]:
        return {s: int(label) + 1 for s, label in zip(self.symbols, self.labels)}


################################################################
# Helpers
################################################################
def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Nearest centroid per point, ties to the lowest cluster index."""
    return np.argmin(_squared_distances(points, centroids), axis=1)


def kmeans_loss(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    """Sum of squared distances of each point to its assigned centroid."""
    diff = np.asarray(points, dtype=float) - np.asarray(centroids, dtype=float)[labels]
    return float(np.sum(diff * diff))


def kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = [points[rng.integers(n)]]
    closest = np.sum((points - centroids[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            i = int(rng.choice(n, p=closest / total))
        else:
            # fewer distinct points than k
            i = int(rng.integers(n))
        centroids.append(points[i])
        closest = np.minimum(closest, np.sum((points - points[i]) ** 2, axis=1))
    return np.array(centroids, dtype=float)


def _repair_empty(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray, k: int) -> np.ndarray:
    """Give each empty cluster the point farthest from its own centroid."""
    labels = labels.copy()
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j] > 0:
            continue
        distances = np.sum((points - centroids[labels]) ** 2, axis=1)
        # only take from clusters that keep a member
        distances[counts[labels] < 2] = -1.0
        i = int(np.argmax(distances))
        if distances[i] < 0:
            continue
        logger.debug(f"cluster {j + 1} empty, reseeded with point {i}")
        labels[i] = j
        centroids[j] = points[i]
    return labels


################################################################
# Functions
################################################################
# k-means
def kmeans_fit(
    points,
    k: int = DEFAULT_K,
    seed: Union[int, np.random.Generator] = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    symbols: Optional[Sequence[str]] = None,
) -> ClusterModel:
    """Lloyd's k-means with k-means++ seeding.

    Stops when no centroid moves by `tol` or more (Euclidean), or after `max_iter` iterations.

    Raises:
        ClusteringError: k < 1, k larger than the number of points, tol <= 0 or max_iter < 1.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if k < 1:
        raise ClusteringError(f"k must be >= 1, got {k}")
    if k > n:
        raise ClusteringError(f"k ({k}) is larger than the number of points ({n})")
    if tol <= 0:
        raise ClusteringError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise ClusteringError(f"max_iter must be >= 1, got {max_iter}")
    symbols = list(symbols) if symbols is not None else [str(i) for i in range(n)]
    if len(symbols) != n:
        raise ClusteringError(f"{len(symbols)} symbols for {n} points")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    centroids = kmeans_plusplus(points, k, rng)

    history = []
    labels = assign(points, centroids)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels = _repair_empty(points, labels, centroids, k)
        updated = np.array(
            [points[labels == j].mean(axis=0) if np.any(labels == j) else centroids[j] for j in range(k)]
        )
        shift = float(np.max(np.sqrt(np.sum((updated - centroids) ** 2, axis=1))))
        centroids = updated
        history.append(kmeans_loss(points, labels, centroids))
        if shift < tol:
            break
        if iterations == max_iter:
            # labels stay the ones the centroids were averaged from
            logger.warning(f"k-means did not converge in {max_iter} iterations")
            break
        labels = assign(points, centroids)

    logger.debug(f"k-means stopped after {iterations} iterations, loss {history[-1]:.6g}")
    return ClusterModel(
        k=k,
        symbols=symbols,
        centroids=centroids,
        labels=labels,
        iterations_run=iterations,
        final_loss=history[-1],
        loss_history=history,
    )


# representatives
def select_representatives(model: ClusterModel, points) -> Dict[int, str]:
    """Member closest to its centroid per non-empty cluster (1-based), ties to the smallest symbol."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    distances = np.sqrt(np.sum((points - model.centroids[model.labels]) ** 2, axis=1))
    representatives = dict()
    for j in range(model.k):
        members = [(float(distances[i]), model.symbols[i]) for i in np.flatnonzero(model.labels == j)]
        if members:
            representatives[j + 1] = min(members)[1]
    return representatives
