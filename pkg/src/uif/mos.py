"""Subjective rating post-processing: agreement statistics, outlier and
subject screening, and MOS computation.

Ratings arrive as a subjects x images matrix on the 1-5 scale with a
validity mask for missing cells. Screening follows the BT.500 convention:
per image, a rating is an outlier when it deviates from the image mean by
more than 2 standard deviations if the rating distribution is roughly
Gaussian (kurtosis in [2, 4]) and by more than sqrt(20) standard deviations
otherwise; a subject with more than 5% outlier ratings is dropped entirely.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import AllInvalid, DegenerateInput

GAUSSIAN_FACTOR = 2.0
HEAVY_TAIL_FACTOR = math.sqrt(20.0)
KURTOSIS_RANGE = (2.0, 4.0)
SUBJECT_OUTLIER_LIMIT = 0.05

MOS_MEAN = 50.0
MOS_STD = 15.0


@dataclass(frozen=True)
class RatingMatrix:
    scores: np.ndarray  # (subjects, images) float
    valid: np.ndarray  # (subjects, images) bool
    subject_ids: tuple[str, ...]
    image_ids: tuple[str, ...]

    def __post_init__(self):
        if self.scores.shape != self.valid.shape:
            raise ValueError("scores and validity mask shapes differ")
        if self.scores.shape[0] != len(self.subject_ids):
            raise ValueError("subject id count does not match matrix rows")
        if self.scores.shape[1] != len(self.image_ids):
            raise ValueError("image id count does not match matrix columns")


@dataclass(frozen=True)
class MosTable:
    image_ids: tuple[str, ...]
    mos: np.ndarray
    n_valid: np.ndarray


@dataclass(frozen=True)
class ScreeningResult:
    matrix: RatingMatrix
    outliers: np.ndarray  # pass-one outlier cells
    rejected_subjects: tuple[str, ...]


def ncc(a, b) -> float:
    """Normalized cross correlation of two raw rating vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = float(np.sqrt(np.sum(a * a)))
    nb = float(np.sqrt(np.sum(b * b)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInput("zero rating vector")
    return float(np.dot(a, b) / (na * nb))


def eud(a, b) -> float:
    """Normalized Euclidean distance between two rating vectors.

    Scores are first mapped from [1, 5] onto [0, 1]; the distance is then
    divided by the geometric mean of the two vector norms.
    """
    a = (np.asarray(a, dtype=np.float64) - 1.0) / 4.0
    b = (np.asarray(b, dtype=np.float64) - 1.0) / 4.0
    na = float(np.sqrt(np.sum(a * a)))
    nb = float(np.sqrt(np.sum(b * b)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInput("zero rating vector after rescaling")
    return float(np.sqrt(np.sum((a - b) ** 2)) / math.sqrt(na * nb))


def _column_outliers(scores: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Pass one: flag per-image outlier cells (returns a subjects x images mask)."""
    out = np.zeros_like(valid)
    for j in range(scores.shape[1]):
        col_valid = valid[:, j]
        vals = scores[col_valid, j]
        if vals.size < 2:
            continue
        mean = vals.mean()
        std = vals.std(ddof=1)
        if std == 0.0:
            continue
        m2 = np.mean((vals - mean) ** 2)
        m4 = np.mean((vals - mean) ** 4)
        kurtosis = m4 / (m2 * m2)
        factor = (
            GAUSSIAN_FACTOR
            if KURTOSIS_RANGE[0] <= kurtosis <= KURTOSIS_RANGE[1]
            else HEAVY_TAIL_FACTOR
        )
        deviates = np.abs(scores[:, j] - mean) > factor * std
        out[:, j] = col_valid & deviates
    return out


def screen_ratings(ratings: RatingMatrix) -> ScreeningResult:
    """Two-pass screening: invalidate outlier cells, then drop any subject
    whose outlier fraction (over their valid ratings) exceeds 5%."""
    outliers = _column_outliers(ratings.scores, ratings.valid)
    n_valid = ratings.valid.sum(axis=1)
    n_out = outliers.sum(axis=1)
    with np.errstate(invalid="ignore"):
        fraction = np.where(n_valid > 0, n_out / np.maximum(n_valid, 1), 0.0)
    rejected = fraction > SUBJECT_OUTLIER_LIMIT

    new_valid = ratings.valid & ~outliers
    new_valid[rejected, :] = False
    matrix = RatingMatrix(
        scores=ratings.scores.copy(),
        valid=new_valid,
        subject_ids=ratings.subject_ids,
        image_ids=ratings.image_ids,
    )
    rejected_ids = tuple(
        sid for sid, r in zip(ratings.subject_ids, rejected) if r
    )
    return ScreeningResult(matrix=matrix, outliers=outliers, rejected_subjects=rejected_ids)


def reject_outliers(ratings: RatingMatrix) -> RatingMatrix:
    return screen_ratings(ratings).matrix


def compute_mos(ratings: RatingMatrix) -> MosTable:
    """Per-subject z-scores rescaled to mean 50 / std 15, averaged per image.

    A subject with zero rating variance contributes z = 0 (i.e. plain 50).
    Raises AllInvalid if any image ends up with no valid rating.
    """
    scores = ratings.scores
    valid = ratings.valid
    normalized = np.zeros_like(scores)
    for i in range(scores.shape[0]):
        row_valid = valid[i]
        vals = scores[i, row_valid]
        if vals.size == 0:
            continue
        std = vals.std(ddof=1) if vals.size > 1 else 0.0
        if std > 0.0:
            z = (scores[i] - vals.mean()) / std
        else:
            z = np.zeros(scores.shape[1])
        normalized[i] = MOS_MEAN + MOS_STD * z

    n_valid = valid.sum(axis=0)
    if np.any(n_valid == 0):
        missing = [ratings.image_ids[j] for j in np.flatnonzero(n_valid == 0)]
        raise AllInvalid("images with no valid ratings: %s" % ", ".join(missing))
    sums = np.where(valid, normalized, 0.0).sum(axis=0)
    return MosTable(
        image_ids=ratings.image_ids,
        mos=sums / n_valid,
        n_valid=n_valid.astype(int),
    )


def subject_agreement(ratings: RatingMatrix) -> tuple[float, float]:
    """Mean NCC and EUD over all subject pairs, on jointly valid cells."""
    nccs, euds = [], []
    n = ratings.scores.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            both = ratings.valid[i] & ratings.valid[j]
            if not both.any():
                continue
            a = ratings.scores[i, both]
            b = ratings.scores[j, both]
            try:
                nccs.append(ncc(a, b))
                euds.append(eud(a, b))
            except DegenerateInput:
                continue
    if not nccs:
        raise DegenerateInput("no comparable subject pairs")
    return float(np.mean(nccs)), float(np.mean(euds))


def read_ratings_csv(path) -> RatingMatrix:
    """Rows are subjects, columns are image ids, blank cells are missing.

    Header: ``subject,<image id>,...``.
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty ratings CSV") from None
        if len(header) < 2:
            raise ValueError("ratings CSV needs a subject column and image columns")
        image_ids = tuple(h.strip() for h in header[1:])
        subject_ids, score_rows, valid_rows = [], [], []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError("ratings CSV row width mismatch: %r" % row)
            subject_ids.append(row[0].strip())
            cells = [c.strip() for c in row[1:]]
            valid_rows.append([c != "" for c in cells])
            score_rows.append([float(c) if c != "" else 0.0 for c in cells])
    if not subject_ids:
        raise ValueError("ratings CSV has no subject rows")
    return RatingMatrix(
        scores=np.array(score_rows, dtype=np.float64),
        valid=np.array(valid_rows, dtype=bool),
        subject_ids=tuple(subject_ids),
        image_ids=image_ids,
    )


def write_mos_csv(path, table: MosTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "mos", "n_valid"])
        for img, mos, n in zip(table.image_ids, table.mos, table.n_valid):
            writer.writerow([img, repr(float(mos)), int(n)])
