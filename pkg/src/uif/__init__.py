"""uif: quality scoring for enhanced underwater images.

Extracts naturalness, sharpness and structure features from an
(original, enhanced) image pair and fuses them with an RBF epsilon-SVR into
a single quality score, plus the training / cross-validation / subjective
post-processing harness around it.
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .features import FEATURE_NAMES, FeatureScaler, extract_features
from .image import ColorSpace, PlanarImage, load_image, to_cielab, to_grayscale
from .svr import SvrModel, SvrParams, load_model, predict, save_model, train

__all__ = [
    "FEATURE_NAMES",
    "ColorSpace",
    "FeatureScaler",
    "PlanarImage",
    "SvrModel",
    "SvrParams",
    "backend_name",
    "extract_features",
    "load_image",
    "load_model",
    "predict",
    "save_model",
    "to_cielab",
    "to_grayscale",
    "train",
]
