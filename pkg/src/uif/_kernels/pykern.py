"""Numpy implementations of the hot kernels.

Drop-in equivalents of the compiled routines in ``_ckern``; the package
selects one of the two at import time (see ``uif._kernels``). Every function
here must keep the exact semantics of its compiled twin: same padding rule,
same tie-breaking, same update order.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

BACKEND = "python"


def box_stats(plane: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel mean and standard deviation over a (2r+1)^2 box.

    Borders use symmetric padding (edge sample repeated, ``np.pad`` rule).
    Variance is clamped at zero before the square root.
    """
    size = 2 * radius + 1
    padded = np.pad(plane, radius, mode="symmetric")
    n = float(size * size)
    s1 = _window_sum(padded, size)
    s2 = _window_sum(padded * padded, size)
    mean = s1 / n
    var = s2 / n - mean * mean
    np.maximum(var, 0.0, out=var)
    return mean, np.sqrt(var)


def _window_sum(padded: np.ndarray, size: int) -> np.ndarray:
    c = np.cumsum(np.cumsum(padded, axis=0, dtype=np.float64), axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    return c[size:, size:] - c[:-size, size:] - c[size:, :-size] + c[:-size, :-size]


# Neighbor offsets (dy, dx) on each side of a pixel, indexed by gradient
# sector: 0 = horizontal gradient, 1 = diagonal down-right, 2 = vertical,
# 3 = diagonal down-left. Out-of-image neighbors count as magnitude 0.
_SECTOR_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


def canny_nms(mag: np.ndarray, sector: np.ndarray) -> np.ndarray:
    """Non-maximum suppression: keep pixels >= both neighbors along the
    gradient sector (and with nonzero magnitude)."""
    h, w = mag.shape
    padded = np.pad(mag, 1)
    n1 = np.empty_like(mag)
    n2 = np.empty_like(mag)
    for s, (dy, dx) in enumerate(_SECTOR_OFFSETS):
        sel = sector == s
        n1[sel] = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w][sel]
        n2[sel] = padded[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w][sel]
    return (mag > 0.0) & (mag >= n1) & (mag >= n2)


def hysteresis(weak: np.ndarray, strong: np.ndarray) -> np.ndarray:
    """Keep the 8-connected components of ``weak`` that touch a strong pixel.

    ``strong`` must be a subset of ``weak``.
    """
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros_like(weak)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def smo_solve(
    gram,
    y: np.ndarray,
    c: float,
    epsilon: float,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, int, bool]:
    """Solve the epsilon-insensitive SVR dual by SMO.

    ``gram`` is either the dense (n, n) kernel matrix or any object exposing
    ``diag`` (n,) and ``col(i) -> (n,)`` for on-demand kernel columns.

    The 2n box-constrained variables are z = [alpha; alpha*]; working pairs
    are picked by maximal violation and updated analytically. Deterministic:
    ties in the selection go to the lowest index.

    Returns (dual_coefs, bias, iterations, converged) where
    dual_coefs[i] = alpha_i - alpha*_i.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if isinstance(gram, np.ndarray):
        diag = np.ascontiguousarray(np.diagonal(gram))
        col = lambda i: gram[:, i]
    else:
        diag = gram.diag
        col = gram.col

    s = np.concatenate([np.ones(n), -np.ones(n)])
    z = np.zeros(2 * n)
    # Gradient of the dual objective; starts at the linear term.
    grad = np.concatenate([epsilon - y, epsilon + y])

    it = 0
    converged = False
    while True:
        viol = -s * grad
        up = ((s > 0.0) & (z < c)) | ((s < 0.0) & (z > 0.0))
        low = ((s > 0.0) & (z > 0.0)) | ((s < 0.0) & (z < c))
        i = int(np.argmax(np.where(up, viol, -np.inf)))
        j = int(np.argmin(np.where(low, viol, np.inf)))
        m_up = viol[i] if up[i] else -np.inf
        m_low = viol[j] if low[j] else np.inf
        if m_up - m_low <= tol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1

        ii = i % n
        jj = j % n
        eta = diag[ii] + diag[jj] - 2.0 * col(ii)[jj]
        cap_i = (c - z[i]) if s[i] > 0.0 else z[i]
        cap_j = z[j] if s[j] > 0.0 else (c - z[j])
        lam = (m_up - m_low) / eta if eta > 1e-12 else np.inf
        lam = min(lam, cap_i, cap_j)

        if lam >= cap_i:
            z[i] = c if s[i] > 0.0 else 0.0
        else:
            z[i] += s[i] * lam
        if lam >= cap_j:
            z[j] = 0.0 if s[j] > 0.0 else c
        else:
            z[j] -= s[j] * lam

        delta = col(ii) - col(jj)
        grad += (lam * s) * np.concatenate([delta, delta])

    beta = z[:n] - z[n:]
    if np.isneginf(m_up) and np.isposinf(m_low):
        bias = 0.0
    elif np.isneginf(m_up):
        bias = float(m_low)
    elif np.isposinf(m_low):
        bias = float(m_up)
    else:
        bias = float(0.5 * (m_up + m_low))
    return beta, bias, it, converged
