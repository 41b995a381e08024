from . import kmeans, projection, standardize
from .kmeans import ClusterModel, assign, kmeans_fit, kmeans_loss, select_representatives
from .projection import project_2d
from .standardize import Standardizer, standardize
from .pipeline import ClusterSelection, cluster_assets

__all__ = ["kmeans", "projection", "standardize", "pipeline"]
