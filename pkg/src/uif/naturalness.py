"""Naturalness features: GGD shape/variance of brightness plus CIELab
luminance contrast and chroma-to-luminance ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateInput
from .image import PlanarImage, to_cielab, to_grayscale

# Shape-parameter search grid: [0.1, 10] in steps of 0.001.
_NU_GRID = np.linspace(0.1, 10.0, 9901)
_R_GRID = None

# Luminance floor for the ratio features; keeps divisions finite on black pixels.
LUMINANCE_FLOOR = 1.0


@dataclass(frozen=True)
class GgdFit:
    nu: float
    sigma2: float


def _ratio_grid() -> np.ndarray:
    # r(nu) = Gamma(2/nu)^2 / (Gamma(1/nu) * Gamma(3/nu)), via gammaln for range.
    global _R_GRID
    if _R_GRID is None:
        inv = 1.0 / _NU_GRID
        _R_GRID = np.exp(2.0 * gammaln(2.0 * inv) - gammaln(inv) - gammaln(3.0 * inv))
    return _R_GRID


def fit_ggd(samples) -> GgdFit:
    """Moment-matching fit of a zero-mean generalized Gaussian.

    The shape nu is the grid value whose theoretical ratio
    (E|x|)^2 / var(x) is closest to the empirical one; sigma2 is the sample
    variance about the mean. A Gaussian gives nu = 2, a Laplacian nu = 1.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise DegenerateInput("no samples")
    mean = x.mean()
    var = float(np.mean((x - mean) ** 2))
    if var <= 0.0 or not np.isfinite(var):
        raise DegenerateInput("samples have zero variance")
    mean_abs = float(np.mean(np.abs(x - mean)))
    rho = mean_abs * mean_abs / var
    nu = float(_NU_GRID[np.argmin(np.abs(_ratio_grid() - rho))])
    return GgdFit(nu=nu, sigma2=var)


def naturalness_features(enhanced: PlanarImage) -> dict[str, float]:
    """The four naturalness features of an enhanced image.

    Returns nu and sigma2 of the GGD fitted to the mean-subtracted grayscale
    brightness, the CIELab luminance contrast c_cie = L_max / max(L_min, 1),
    and sigma_cie, the mean per-pixel chroma magnitude over luminance.
    """
    gray = to_grayscale(enhanced).planes[0]
    fit = fit_ggd(gray - gray.mean())

    lum, a, b = to_cielab(enhanced).planes
    l_max = float(lum.max())
    l_min = float(lum.min())
    c_cie = l_max / max(l_min, LUMINANCE_FLOOR)
    chroma = np.sqrt(a * a + b * b)
    sigma_cie = float(np.mean(chroma / np.maximum(lum, LUMINANCE_FLOOR)))
    return {"nu": fit.nu, "sigma2": fit.sigma2, "c_cie": c_cie, "sigma_cie": sigma_cie}
