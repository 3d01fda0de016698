"""Assembly of the 11-feature vector and LIBSVM-style min-max scaling.

The feature order is frozen; CSV headers and model files rely on it:

    nu, sigma2, c_cie, sigma_cie,          naturalness
    mu_dark, contrast, edge_contrast, entropy,   sharpness
    s_sigma, s_mu, s_ibar                  structure
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, NonFiniteInput
from .image import PlanarImage
from .naturalness import naturalness_features
from .sharpness import sharpness_features
from .structure import structure_features

FEATURE_NAMES = (
    "nu",
    "sigma2",
    "c_cie",
    "sigma_cie",
    "mu_dark",
    "contrast",
    "edge_contrast",
    "entropy",
    "s_sigma",
    "s_mu",
    "s_ibar",
)
N_FEATURES = len(FEATURE_NAMES)

FEATURE_GROUPS = {
    "naturalness": slice(0, 4),
    "sharpness": slice(4, 8),
    "structure": slice(8, 11),
}


def extract_features(orig: PlanarImage, enh: PlanarImage) -> np.ndarray:
    """Extract the 11 features for one (original, enhanced) pair.

    Naturalness and sharpness look only at the enhanced image; structure
    compares the two. Returns a float64 vector in the frozen order.
    """
    parts = {}
    parts.update(naturalness_features(enh))
    parts.update(sharpness_features(enh))
    parts.update(structure_features(enh, orig))
    vec = np.array([parts[name] for name in FEATURE_NAMES], dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        bad = [FEATURE_NAMES[i] for i in np.flatnonzero(~np.isfinite(vec))]
        raise NonFiniteInput("non-finite feature(s): %s" % ", ".join(bad))
    return vec


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature linear map [min, max] -> [-1, 1] learned from training data.

    Out-of-range values extrapolate linearly (no clamping); a constant
    feature column maps to 0.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, vectors) -> "FeatureScaler":
        mat = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if mat.shape[0] < 2:
            raise InsufficientData("need at least 2 vectors to fit the scaler")
        if not np.all(np.isfinite(mat)):
            raise NonFiniteInput("training features contain NaN or infinity")
        return cls(mins=mat.min(axis=0), maxs=mat.max(axis=0))

    def transform(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.float64)
        span = self.maxs - self.mins
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = -1.0 + 2.0 * (vec - self.mins) / span
        return np.where(span > 0.0, scaled, 0.0)

    def inverse(self, scaled: np.ndarray) -> np.ndarray:
        scaled = np.asarray(scaled, dtype=np.float64)
        span = self.maxs - self.mins
        return np.where(span > 0.0, self.mins + (scaled + 1.0) * span / 2.0, self.mins)


def write_features_csv(path, vectors, mos=None) -> None:
    """Dump feature vectors (optionally with labels) as UTF-8 CSV.

    Header is the frozen feature-name order, plus ``mos`` when labels are
    given; one row per pair in input order.
    """
    rows = [np.asarray(v, dtype=np.float64) for v in vectors]
    if mos is not None and len(mos) != len(rows):
        raise ValueError("mos length does not match the number of vectors")
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        header = list(FEATURE_NAMES) + (["mos"] if mos is not None else [])
        writer.writerow(header)
        for idx, vec in enumerate(rows):
            row = [repr(float(v)) for v in vec]
            if mos is not None:
                row.append(repr(float(mos[idx])))
            writer.writerow(row)


def read_features_csv(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Read a feature CSV back; returns (features, mos-or-None)."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        has_mos = header == list(FEATURE_NAMES) + ["mos"]
        if not has_mos and header != list(FEATURE_NAMES):
            raise ValueError("unexpected feature CSV header: %r" % header)
        feats, labels = [], []
        for row in reader:
            values = [float(v) for v in row]
            if has_mos:
                feats.append(values[:-1])
                labels.append(values[-1])
            else:
                feats.append(values)
    mat = np.array(feats, dtype=np.float64).reshape(-1, N_FEATURES)
    return mat, (np.array(labels) if has_mos else None)
