"""Structure features: local-statistics similarity maps between the original
and enhanced image, pooled to scalars.

All three similarity measures work on grayscale brightness with local mean
and standard deviation taken over a uniform 7x7 window (symmetric border
padding). The variance and mean similarities live in (0, 1]; the
normalized-plane similarity can go negative where the normalized images
anticorrelate, and is deliberately left unclamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import _kernels
from .errors import ShapeMismatch, TooSmall
from .image import PlanarImage, to_grayscale

WINDOW = 7
C_VARIANCE = (0.03 * 255.0) ** 2
C_MEAN = (0.01 * 255.0) ** 2
C_NORMALIZED = 0.5
SIGMA_FLOOR = 1.0


@dataclass(frozen=True)
class SimilarityMap:
    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def pooled(self) -> float:
        return float(self.values.mean())


def local_stats(gray: PlanarImage, window: int = WINDOW) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel mean and standard deviation over a window x window box."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    plane = gray.planes[0]
    if plane.shape[0] < window or plane.shape[1] < window:
        raise TooSmall("image smaller than the %dx%d stats window" % (window, window))
    return _kernels.box_stats(plane, window // 2)


def _check_same_shape(enh: PlanarImage, orig: PlanarImage):
    if (enh.height, enh.width) != (orig.height, orig.width):
        raise ShapeMismatch(
            "image sizes differ: %dx%d vs %dx%d"
            % (enh.width, enh.height, orig.width, orig.height)
        )


def variance_similarity(enh: PlanarImage, orig: PlanarImage) -> SimilarityMap:
    _check_same_shape(enh, orig)
    _, sig_e = local_stats(enh)
    _, sig_o = local_stats(orig)
    # Squares written as explicit products so identical inputs give exactly 1.
    values = (2.0 * (sig_e * sig_o) + C_VARIANCE) / (
        sig_e * sig_e + sig_o * sig_o + C_VARIANCE
    )
    return SimilarityMap(values)


def mean_similarity(enh: PlanarImage, orig: PlanarImage) -> SimilarityMap:
    _check_same_shape(enh, orig)
    mu_e, _ = local_stats(enh)
    mu_o, _ = local_stats(orig)
    values = (2.0 * (mu_e * mu_o) + C_MEAN) / (mu_e * mu_e + mu_o * mu_o + C_MEAN)
    return SimilarityMap(values)


def normalized_similarity(enh: PlanarImage, orig: PlanarImage) -> SimilarityMap:
    _check_same_shape(enh, orig)
    norm_e = _normalized_plane(enh)
    norm_o = _normalized_plane(orig)
    values = (2.0 * (norm_e * norm_o) + C_NORMALIZED) / (
        norm_e * norm_e + norm_o * norm_o + C_NORMALIZED
    )
    return SimilarityMap(values)


def _normalized_plane(gray: PlanarImage) -> np.ndarray:
    mu, sig = local_stats(gray)
    return (gray.planes[0] - mu) / (sig + SIGMA_FLOOR)


def structure_features(enh: PlanarImage, orig: PlanarImage) -> dict[str, float]:
    """Average-pooled similarity scalars between enhanced and original."""
    enh_gray = to_grayscale(enh) if enh.channels == 3 else enh
    orig_gray = to_grayscale(orig) if orig.channels == 3 else orig
    return {
        "s_sigma": variance_similarity(enh_gray, orig_gray).pooled(),
        "s_mu": mean_similarity(enh_gray, orig_gray).pooled(),
        "s_ibar": normalized_similarity(enh_gray, orig_gray).pooled(),
    }


def save_similarity_png(sim: SimilarityMap, path) -> None:
    """Debug dump: values linearly mapped [min, max] -> [0, 255] grayscale."""
    values = sim.values
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        scaled = (values - lo) * (255.0 / (hi - lo))
    else:
        scaled = np.zeros_like(values)
    Image.fromarray(np.rint(scaled).astype(np.uint8), mode="L").save(path)
