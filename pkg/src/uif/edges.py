"""Canny edge detection on a single float plane.

Fixed, reproducible parameterization: Gaussian smoothing with sigma = sqrt(2),
Sobel gradients, 4-sector non-maximum suppression, double threshold at
high = 0.7 quantile of the nonzero gradient magnitudes and low = 0.4 * high,
8-connected hysteresis. Borders are handled with symmetric padding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels

GAUSSIAN_SIGMA = math.sqrt(2.0)
HIGH_QUANTILE = 0.7
LOW_RATIO = 0.4


@dataclass(frozen=True)
class EdgeMap:
    mask: np.ndarray  # bool, same shape as the source plane

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def count(self) -> int:
        return int(self.mask.sum())


def canny(plane: np.ndarray) -> EdgeMap:
    plane = np.asarray(plane, dtype=np.float64)
    smoothed = ndimage.gaussian_filter(plane, sigma=GAUSSIAN_SIGMA, mode="reflect")
    gx = ndimage.sobel(smoothed, axis=1, mode="reflect")
    gy = ndimage.sobel(smoothed, axis=0, mode="reflect")
    mag = np.hypot(gx, gy)

    nonzero = mag[mag > 0.0]
    if nonzero.size == 0:
        return EdgeMap(np.zeros(plane.shape, dtype=bool))
    high = float(np.quantile(nonzero, HIGH_QUANTILE))
    low = LOW_RATIO * high

    # Gradient angle folded to [0, 180), quantized to 45-degree sectors.
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    sector = (((angle + 22.5) // 45.0) % 4).astype(np.int8)

    candidates = _kernels.canny_nms(mag, sector)
    strong = candidates & (mag >= high)
    if not strong.any():
        return EdgeMap(np.zeros(plane.shape, dtype=bool))
    weak = candidates & (mag >= low)
    return EdgeMap(_kernels.hysteresis(weak, strong))
