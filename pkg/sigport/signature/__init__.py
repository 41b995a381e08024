from . import features, tensor, transforms
from .features import FeatureVector, IncrementalSignature, asset_features, feature_words, features_to_frame
from .tensor import Signature, Word, chen_concatenate, coefficient_count, path_signature, segment_signature
from .transforms import lead_lag_transform, log_rebase

__all__ = ["features", "tensor", "transforms"]
