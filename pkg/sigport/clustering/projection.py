import logging

import numpy as np

from ..common import ClusteringError

logger = logging.getLogger(__name__)


# 2-d projection
def project_2d(points) -> np.ndarray:
    """Coordinates on the first two principal components, shape (n, 2).

    Components are ordered by decreasing variance and signed so that each one's
    largest-magnitude loading is positive. Data of dimension 1 gets a zero second coordinate.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[0] < 2:
        raise ClusteringError(f"projection needs at least 2 points, got {points.shape[0]}")

    centered = points - points.mean(axis=0)
    covariance = np.atleast_2d(np.cov(centered, rowvar=False))
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:2]
    components = eigenvectors[:, order]
    for j in range(components.shape[1]):
        if components[np.argmax(np.abs(components[:, j])), j] < 0:
            components[:, j] = -components[:, j]

    coordinates = centered @ components
    if coordinates.shape[1] < 2:
        coordinates = np.column_stack([coordinates, np.zeros(points.shape[0])])
    return coordinates
