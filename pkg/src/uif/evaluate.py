"""Correlation metrics, k-fold cross-validation and feature-group ablations.

Cross-validation is leakage-free by construction: for every fold the scaler
and the regressor see only the training folds. The aggregate SRCC/PLCC is
computed once over the pooled held-out predictions; per-fold values are also
reported. Fold assignment groups all enhanced versions of one original image
into the same fold unless grouping is disabled.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import random
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateInput, InvalidMask
from .features import FEATURE_GROUPS, N_FEATURES, extract_features
from .image import load_image
from .svr import SvrModel, SvrParams, predict_features, train

GROUP_ORDER = ("naturalness", "sharpness", "structure")

# The seven ablation variants: mask -> (method number, description).
_METHODS = {
    ("naturalness",): (1, "only naturalness"),
    ("sharpness",): (2, "only sharpness"),
    ("structure",): (3, "only structure"),
    ("naturalness", "sharpness"): (4, "naturalness and sharpness"),
    ("sharpness", "structure"): (5, "sharpness and structure"),
    ("naturalness", "structure"): (6, "naturalness and structure"),
    ("naturalness", "sharpness", "structure"): (7, "all type features"),
}


@dataclass(frozen=True)
class PairRecord:
    id: str
    original: str
    enhanced: str
    mos: float | None = None


@dataclass
class DatasetManifest:
    records: list[PairRecord]
    folds: np.ndarray | None = None  # per-record fold index in [0, k)


@dataclass
class EvalReport:
    method: int
    method_label: str
    groups: tuple[str, ...]
    hyperparams: dict
    k: int
    seed: int | None
    per_fold: list[dict]
    pooled_srcc: float
    pooled_plcc: float
    n_records: int
    warnings: list[str] = field(default_factory=list)
    fold_models: list[SvrModel] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        payload = {
            "method": self.method,
            "method_label": self.method_label,
            "groups": list(self.groups),
            "hyperparams": self.hyperparams,
            "k": self.k,
            "seed": self.seed,
            "per_fold": self.per_fold,
            "pooled_srcc": self.pooled_srcc,
            "pooled_plcc": self.pooled_plcc,
            "n_records": self.n_records,
            "warnings": self.warnings,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def srcc(pred, truth) -> float:
    """Spearman rank correlation, average ranks on ties."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape or pred.size < 2:
        raise ValueError("need two equal-length vectors of size >= 2")
    return plcc(rankdata(pred, method="average"), rankdata(truth, method="average"))


def plcc(pred, truth) -> float:
    """Pearson linear correlation."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape or pred.size < 2:
        raise ValueError("need two equal-length vectors of size >= 2")
    dp = pred - pred.mean()
    dt = truth - truth.mean()
    denom = np.sqrt(np.sum(dp * dp) * np.sum(dt * dt))
    if denom == 0.0:
        raise DegenerateInput("constant vector has no defined correlation")
    return float(np.sum(dp * dt) / denom)


def plcc_logistic(pred, truth) -> float:
    """Pearson after the 5-parameter logistic remap used in IQA evaluation."""
    from scipy.optimize import curve_fit

    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)

    def logistic(x, b1, b2, b3, b4, b5):
        return b1 * (0.5 - 1.0 / (1.0 + np.exp(np.clip(b2 * (x - b3), -500, 500)))) + b4 * x + b5

    p0 = [truth.max() - truth.min(), 1.0 / max(pred.std(), 1e-6), pred.mean(), 0.0, truth.mean()]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            popt, _ = curve_fit(logistic, pred, truth, p0=p0, method="trf", maxfev=50000)
        return plcc(logistic(pred, *popt), truth)
    except (RuntimeError, DegenerateInput):
        return plcc(pred, truth)


def parse_mask(mask) -> tuple[str, ...]:
    """Normalize a mask ('all', 'naturalness+structure', iterable, ...) to a
    canonical group tuple."""
    items = mask.replace("+", ",").split(",") if isinstance(mask, str) else list(mask)
    groups = [str(g).strip().lower() for g in items if str(g).strip()]
    if groups == ["all"]:
        groups = list(GROUP_ORDER)
    unknown = [g for g in groups if g not in GROUP_ORDER]
    if unknown:
        raise InvalidMask("unknown feature group(s): %s" % ", ".join(unknown))
    selected = tuple(g for g in GROUP_ORDER if g in groups)
    if not selected:
        raise InvalidMask("the feature mask selects no group")
    return selected


def mask_indices(groups: tuple[str, ...]) -> np.ndarray:
    cols = []
    for g in groups:
        sl = FEATURE_GROUPS[g]
        cols.extend(range(sl.start, sl.stop))
    return np.array(sorted(cols), dtype=int)


def method_info(groups: tuple[str, ...]) -> tuple[int, str]:
    return _METHODS[tuple(g for g in GROUP_ORDER if g in groups)]


def kfold_split(
    manifest: DatasetManifest, k: int, seed: int, group_by_original: bool = True
) -> DatasetManifest:
    """Assign folds by seeded shuffle + round robin.

    With grouping (default) every record sharing one original path lands in
    the same fold, so enhanced versions of an image never straddle the
    train/test boundary.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    records = manifest.records
    if group_by_original:
        keys = []
        seen = set()
        for r in records:
            if r.original not in seen:
                seen.add(r.original)
                keys.append(r.original)
        if len(keys) < k:
            raise ValueError("fewer groups (%d) than folds (%d)" % (len(keys), k))
        rng = random.Random(seed)
        rng.shuffle(keys)
        fold_of_key = {key: i % k for i, key in enumerate(keys)}
        folds = np.array([fold_of_key[r.original] for r in records], dtype=int)
    else:
        if len(records) < k:
            raise ValueError("fewer records (%d) than folds (%d)" % (len(records), k))
        order = list(range(len(records)))
        rng = random.Random(seed)
        rng.shuffle(order)
        folds = np.empty(len(records), dtype=int)
        for pos, idx in enumerate(order):
            folds[idx] = pos % k
    return DatasetManifest(records=records, folds=folds)


def _extract_one(args):
    idx, orig_path, enh_path = args
    try:
        vec = extract_features(load_image(orig_path), load_image(enh_path))
        return idx, vec, None
    except Exception as exc:  # collected per pair, reported by the caller
        return idx, None, "%s: %s" % (type(exc).__name__, exc)


def extract_batch(records: list[PairRecord], jobs: int = 1):
    """Extract features for many pairs; returns (n, 11) array with NaN rows
    for failures plus a {index: message} error map. Row order follows the
    manifest regardless of completion order."""
    args = [(i, r.original, r.enhanced) for i, r in enumerate(records)]
    out = np.full((len(records), N_FEATURES), np.nan)
    errors: dict[int, str] = {}
    if jobs <= 1:
        results = map(_extract_one, args)
    else:
        pool = concurrent.futures.ProcessPoolExecutor(max_workers=jobs)
        results = pool.map(_extract_one, args)
    for idx, vec, err in results:
        if err is None:
            out[idx] = vec
        else:
            errors[idx] = err
    if jobs > 1:
        pool.shutdown()
    return out, errors


def cross_validate_features(
    features: np.ndarray,
    labels: np.ndarray,
    folds: np.ndarray,
    params: SvrParams = SvrParams(),
    mask="all",
    seed: int | None = None,
    logistic: bool = False,
) -> EvalReport:
    """k-fold evaluation over precomputed feature vectors."""
    groups = parse_mask(mask)
    cols = mask_indices(groups)
    method, label = method_info(groups)
    x = np.asarray(features, dtype=np.float64)[:, cols]
    y = np.asarray(labels, dtype=np.float64)
    folds = np.asarray(folds, dtype=int)
    k = int(folds.max()) + 1

    plcc_fn = plcc_logistic if logistic else plcc
    pooled_pred = np.empty_like(y)
    per_fold = []
    notes = []
    models = []
    for f in range(k):
        test = folds == f
        model = train(x[~test], y[~test], params)
        models.append(model)
        entry = {"fold": f, "n_test": int(test.sum())}
        if not test.any():
            entry["srcc"] = None
            entry["plcc"] = None
            per_fold.append(entry)
            continue
        pred = predict_features(model, x[test])
        pooled_pred[test] = pred
        try:
            entry["srcc"] = float(srcc(pred, y[test]))
            entry["plcc"] = float(plcc_fn(pred, y[test]))
        except (DegenerateInput, ValueError):
            entry["srcc"] = None
            entry["plcc"] = None
            notes.append("fold %d: per-fold correlation undefined" % f)
        per_fold.append(entry)

    return EvalReport(
        method=method,
        method_label=label,
        groups=groups,
        hyperparams={"c": float(params.c), "epsilon": float(params.epsilon), "gamma": float(params.gamma)},
        k=k,
        seed=seed,
        per_fold=per_fold,
        pooled_srcc=float(srcc(pooled_pred, y)),
        pooled_plcc=float(plcc_fn(pooled_pred, y)),
        n_records=int(y.size),
        warnings=notes,
        fold_models=models,
    )


def cross_validate(
    manifest: DatasetManifest,
    params: SvrParams = SvrParams(),
    mask="all",
    seed: int | None = None,
    jobs: int = 1,
    logistic: bool = False,
) -> EvalReport:
    """Extract features for every manifest record and run the k-fold loop.

    The manifest must already carry fold assignments (see kfold_split) and
    MOS labels for every record.
    """
    if manifest.folds is None:
        raise ValueError("manifest has no fold assignment; run kfold_split first")
    if any(r.mos is None for r in manifest.records):
        raise ValueError("manifest is missing MOS labels")
    feats, errors = extract_batch(manifest.records, jobs=jobs)
    if errors:
        bad = ", ".join(manifest.records[i].id for i in sorted(errors))
        raise ValueError("feature extraction failed for: %s" % bad)
    labels = np.array([r.mos for r in manifest.records])
    return cross_validate_features(
        feats, labels, manifest.folds, params=params, mask=mask, seed=seed, logistic=logistic
    )


def read_manifest(path, require_mos: bool = False) -> DatasetManifest:
    """CSV with columns id, original, enhanced and optionally mos and fold."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise ValueError("empty manifest CSV")
        required = {"id", "original", "enhanced"}
        missing = required - set(reader.fieldnames)
        if missing:
            raise ValueError("manifest missing column(s): %s" % ", ".join(sorted(missing)))
        if require_mos and "mos" not in reader.fieldnames:
            raise ValueError("manifest missing the mos column")
        records = []
        folds = []
        for row in reader:
            mos = row.get("mos")
            records.append(
                PairRecord(
                    id=row["id"].strip(),
                    original=row["original"].strip(),
                    enhanced=row["enhanced"].strip(),
                    mos=float(mos) if mos not in (None, "") else None,
                )
            )
            folds.append(row.get("fold"))
    if require_mos and any(r.mos is None for r in records):
        raise ValueError("manifest has rows without a mos value")
    fold_arr = None
    if any(v not in (None, "") for v in folds):
        if any(v in (None, "") for v in folds):
            raise ValueError("manifest has a partial fold column")
        fold_arr = np.array([int(v) for v in folds], dtype=int)
    return DatasetManifest(records=records, folds=fold_arr)
