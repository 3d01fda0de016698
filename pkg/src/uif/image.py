"""Planar image container, PNG/JPEG decoding and color conversions.

Images are kept as per-channel float64 planes on the 8-bit scale: sRGB and
gray values live in [0, 255] (no normalization to [0, 1]; the histogram and
dark-channel measures assume 0-255 levels). CIELab planes use the usual
L in [0, 100], a/b in roughly [-128, 127].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, IoError, ShapeError

# ITU-R BT.601 luma weights, the rgb2gray convention.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# sRGB (D65) to XYZ, linear-light input in [0, 1].
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = (0.95047, 1.0, 1.08883)


class ColorSpace(enum.Enum):
    SRGB_8BIT_SCALED = "srgb8"
    GRAY = "gray"
    CIELAB = "cielab"


@dataclass(frozen=True)
class PlanarImage:
    """Immutable per-channel raster. ``planes`` is a tuple of (h, w) float64
    arrays, one per channel (1 for GRAY, 3 otherwise)."""

    planes: tuple[np.ndarray, ...]
    space: ColorSpace

    def __post_init__(self):
        if len(self.planes) not in (1, 3):
            raise ShapeError("expected 1 or 3 planes, got %d" % len(self.planes))
        shape = self.planes[0].shape
        for p in self.planes:
            if p.ndim != 2 or p.shape != shape:
                raise ShapeError("planes must share one 2-d shape")
            p.flags.writeable = False

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def channels(self) -> int:
        return len(self.planes)


def _planes_from_array(arr: np.ndarray, space: ColorSpace) -> PlanarImage:
    if arr.ndim == 2:
        return PlanarImage((np.array(arr, dtype=np.float64),), space)
    return PlanarImage(
        tuple(np.ascontiguousarray(arr[:, :, c], dtype=np.float64) for c in range(arr.shape[2])),
        space,
    )


def load_image(path) -> PlanarImage:
    """Decode an 8-bit PNG or JPEG into an SRGB_8BIT_SCALED image.

    Samples are taken as-is onto [0, 255]. Palette/alpha/gray inputs are
    expanded to RGB; higher bit depths are rejected.
    """
    try:
        img = Image.open(path)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        raise IoError("cannot read image file: %s" % path) from exc
    except UnidentifiedImageError as exc:
        raise DecodeError("not a decodable image: %s" % path) from exc
    with img:
        if img.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
            raise DecodeError("unsupported bit depth (%s): %s" % (img.mode, path))
        try:
            rgb = img.convert("RGB")
        except OSError as exc:
            raise DecodeError("corrupt image data: %s" % path) from exc
    arr = np.asarray(rgb, dtype=np.float64)
    return _planes_from_array(arr, ColorSpace.SRGB_8BIT_SCALED)


def to_grayscale(img: PlanarImage) -> PlanarImage:
    """BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B, still on [0, 255]."""
    if img.channels != 3:
        raise ShapeError("grayscale conversion needs a 3-channel image")
    r, g, b = img.planes
    y = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
    return PlanarImage((y,), ColorSpace.GRAY)


def to_cielab(img: PlanarImage) -> PlanarImage:
    """sRGB -> linear RGB -> XYZ (D65) -> CIELab."""
    if img.channels != 3:
        raise ShapeError("CIELab conversion needs a 3-channel image")
    rgb = np.stack(img.planes, axis=-1) / 255.0
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T
    xyz /= _D65_WHITE

    delta = 6.0 / 29.0
    f = np.where(xyz > delta**3, np.cbrt(xyz), xyz / (3.0 * delta**2) + 4.0 / 29.0)
    fx, fy, fz = f[:, :, 0], f[:, :, 1], f[:, :, 2]
    lum = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return PlanarImage(
        (np.ascontiguousarray(lum), np.ascontiguousarray(a), np.ascontiguousarray(b)),
        ColorSpace.CIELAB,
    )
