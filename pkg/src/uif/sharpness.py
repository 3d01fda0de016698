"""Sharpness features: dark-channel mean, textured-patch contrast,
edge-block contrast and histogram entropy."""

from __future__ import annotations

import numpy as np

from .edges import canny
from .errors import ShapeError, TooSmall
from .image import LUMA_WEIGHTS, PlanarImage, to_grayscale

PATCH_SIZE = 64
EDGE_DENSITY_THRESHOLD = 0.002
BLOCK_SIZE = 5
GRAY_LEVELS = 256


def dark_channel_mean(enhanced: PlanarImage) -> float:
    """Mean over pixels of the per-pixel channel minimum (no spatial window)."""
    if enhanced.channels != 3:
        raise ShapeError("dark channel needs a 3-channel image")
    stacked = np.stack(enhanced.planes)
    return float(stacked.min(axis=0).mean())


def textured_patch_contrast(enhanced_gray: PlanarImage) -> float:
    """Sum of per-patch standard deviations over the textured 64x64 patches.

    The image is tiled into non-overlapping 64x64 patches (partial border
    patches are dropped). A patch is textured when its Canny edge density
    exceeds 0.2%.
    """
    plane = enhanced_gray.planes[0]
    h, w = plane.shape
    ph, pw = h // PATCH_SIZE, w // PATCH_SIZE
    if ph == 0 or pw == 0:
        raise TooSmall("image smaller than one %dx%d patch" % (PATCH_SIZE, PATCH_SIZE))
    edge = canny(plane).mask

    crop_h, crop_w = ph * PATCH_SIZE, pw * PATCH_SIZE
    patches = plane[:crop_h, :crop_w].reshape(ph, PATCH_SIZE, pw, PATCH_SIZE)
    edges = edge[:crop_h, :crop_w].reshape(ph, PATCH_SIZE, pw, PATCH_SIZE)

    density = edges.mean(axis=(1, 3))
    textured = density > EDGE_DENSITY_THRESHOLD
    if not textured.any():
        return 0.0
    stds = patches.std(axis=(1, 3))
    return float(stds[textured].sum())


def edge_block_contrast(enhanced: PlanarImage) -> float:
    """Luma-weighted log max/min contrast over edge-containing 5x5 blocks.

    Per channel: Canny on that channel, tile into 5x5 blocks, and over the
    blocks containing at least one edge pixel average 2*log(max/min) of the
    raw intensities (both extremes floored at 1 so the log stays finite and
    nonnegative). Channels combine with the BT.601 weights.
    """
    if enhanced.channels != 3:
        raise ShapeError("edge-block contrast needs a 3-channel image")
    h, w = enhanced.planes[0].shape
    bh, bw = h // BLOCK_SIZE, w // BLOCK_SIZE
    if bh == 0 or bw == 0:
        raise TooSmall("image smaller than one %dx%d block" % (BLOCK_SIZE, BLOCK_SIZE))

    crop_h, crop_w = bh * BLOCK_SIZE, bw * BLOCK_SIZE
    total = 0.0
    for weight, plane in zip(LUMA_WEIGHTS, enhanced.planes):
        edge = canny(plane).mask
        blocks = plane[:crop_h, :crop_w].reshape(bh, BLOCK_SIZE, bw, BLOCK_SIZE)
        has_edge = edge[:crop_h, :crop_w].reshape(bh, BLOCK_SIZE, bw, BLOCK_SIZE).any(axis=(1, 3))
        n_blocks = int(has_edge.sum())
        if n_blocks == 0:
            continue
        bmax = np.maximum(blocks.max(axis=(1, 3))[has_edge], 1.0)
        bmin = np.maximum(blocks.min(axis=(1, 3))[has_edge], 1.0)
        total += weight * (2.0 / n_blocks) * float(np.log(bmax / bmin).sum())
    return total


def entropy(enhanced_gray: PlanarImage) -> float:
    """Shannon entropy (bits) of the 256-bin histogram of rounded brightness."""
    plane = enhanced_gray.planes[0]
    levels = np.clip(np.rint(plane), 0, GRAY_LEVELS - 1).astype(np.intp)
    counts = np.bincount(levels.ravel(), minlength=GRAY_LEVELS)
    p = counts[counts > 0] / plane.size
    return float(-(p * np.log2(p)).sum())


def sharpness_features(enhanced: PlanarImage) -> dict[str, float]:
    gray = to_grayscale(enhanced)
    return {
        "mu_dark": dark_channel_mean(enhanced),
        "contrast": textured_patch_contrast(gray),
        "edge_contrast": edge_block_contrast(enhanced),
        "entropy": entropy(gray),
    }
