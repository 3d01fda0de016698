"""Epsilon-SVR with RBF kernel fused over the scaled feature vector.

Training solves the box-constrained dual with SMO (maximal-violating-pair
working sets, KKT stop tolerance 1e-3), matching the classic LIBSVM scheme.
The full Gram matrix is precomputed up to ``DENSE_LIMIT`` training points;
beyond that, kernel columns are produced on demand through a small LRU cache
(always on the numpy code path).

A trained model carries its own feature scaler, so train and test time apply
the identical transform.
"""

from __future__ import annotations

import warnings
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import FormatError, InsufficientData, IoError, NonFiniteInput
from .features import FEATURE_NAMES, FeatureScaler, extract_features
from .image import PlanarImage

KKT_TOL = 1e-3
DENSE_LIMIT = 4096
MAX_ITER_FACTOR = 10_000
LRU_COLUMNS = 256

MODEL_MAGIC = "uifmodel"
MODEL_VERSION = 1


@dataclass(frozen=True)
class SvrParams:
    c: float = 0.1
    epsilon: float = 0.01
    gamma: float = 1.0

    def validated(self) -> "SvrParams":
        if not (self.c > 0 and self.epsilon > 0 and self.gamma > 0):
            raise ValueError("SVR hyperparameters must all be positive")
        return self


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray  # (k, d), already scaled
    dual_coefs: np.ndarray  # (k,), alpha_i - alpha*_i
    bias: float
    gamma: float
    scaler: FeatureScaler
    params: SvrParams
    feature_names: tuple[str, ...] = field(default=FEATURE_NAMES)


def rbf_gram(x: np.ndarray, z: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||x_i - z_j||^2) for all row pairs."""
    sq = (
        np.sum(x * x, axis=1)[:, None]
        + np.sum(z * z, axis=1)[None, :]
        - 2.0 * (x @ z.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


class _LruGram:
    """Kernel columns computed on demand, bounded LRU cache."""

    def __init__(self, x: np.ndarray, gamma: float, capacity: int = LRU_COLUMNS):
        self._x = x
        self._gamma = gamma
        self._capacity = max(2, capacity)
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self.diag = np.ones(x.shape[0])

    def col(self, i: int) -> np.ndarray:
        cached = self._cache.get(i)
        if cached is not None:
            self._cache.move_to_end(i)
            return cached
        diff = self._x - self._x[i]
        column = np.exp(-self._gamma * np.sum(diff * diff, axis=1))
        self._cache[i] = column
        if len(self._cache) > self._capacity:
            self._cache.popitem(last=False)
        return column


def dual_objective(gram: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    """Value of the minimized dual at beta (with alpha_i * alpha*_i = 0)."""
    return float(
        0.5 * beta @ gram @ beta + epsilon * np.sum(np.abs(beta)) - y @ beta
    )


def train(features, labels, params: SvrParams = SvrParams()) -> SvrModel:
    """Fit the epsilon-SVR on raw (unscaled) feature vectors.

    Fits the min-max scaler on the training features, solves the SMO dual on
    the scaled data and keeps only the support vectors (nonzero dual
    coefficients).
    """
    params = params.validated()
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise InsufficientData("feature and label counts differ")
    if x.shape[0] < 2:
        raise InsufficientData("need at least 2 training samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("training data contains NaN or infinity")

    scaler = FeatureScaler.fit(x)
    xs = scaler.transform(x)

    n = xs.shape[0]
    gram = rbf_gram(xs, xs, params.gamma) if n <= DENSE_LIMIT else _LruGram(xs, params.gamma)
    max_iter = MAX_ITER_FACTOR * max(n, 100)
    beta, bias, _, converged = _kernels.smo_solve(
        gram, y, params.c, params.epsilon, KKT_TOL, max_iter
    )
    if not converged:
        warnings.warn("SMO hit the iteration cap before reaching KKT tolerance")

    support = beta != 0.0
    return SvrModel(
        support_vectors=xs[support],
        dual_coefs=beta[support],
        bias=float(bias),
        gamma=params.gamma,
        scaler=scaler,
        params=params,
    )


def predict_features(model: SvrModel, features) -> np.ndarray:
    """Scores for raw feature vectors; shape (n,)."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    xs = model.scaler.transform(x)
    if model.support_vectors.shape[0] == 0:
        return np.full(xs.shape[0], model.bias)
    k = rbf_gram(xs, model.support_vectors, model.gamma)
    return k @ model.dual_coefs + model.bias


def predict(model: SvrModel, orig: PlanarImage, enh: PlanarImage) -> float:
    """The quality score of an enhanced image given its original."""
    return float(predict_features(model, extract_features(orig, enh))[0])


def save_model(model: SvrModel, path) -> None:
    """Versioned self-describing text format; round-trips bit-exactly."""
    lines = [
        "%s %d" % (MODEL_MAGIC, MODEL_VERSION),
        "c %r" % model.params.c,
        "epsilon %r" % model.params.epsilon,
        "gamma %r" % model.gamma,
        "bias %r" % model.bias,
        "n_features %d" % len(model.feature_names),
        "names %s" % ",".join(model.feature_names),
        "scaler_min %s" % " ".join(repr(float(v)) for v in model.scaler.mins),
        "scaler_max %s" % " ".join(repr(float(v)) for v in model.scaler.maxs),
        "n_sv %d" % model.support_vectors.shape[0],
    ]
    for coef, sv in zip(model.dual_coefs, model.support_vectors):
        lines.append(
            "sv %s %s" % (repr(float(coef)), " ".join(repr(float(v)) for v in sv))
        )
    lines.append("end")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _expect(fields: list[str], key: str, path) -> list[str]:
    if not fields or fields[0] != key:
        raise FormatError("model file %s: expected '%s' line" % (path, key))
    return fields[1:]


def load_model(path) -> SvrModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        raise IoError("cannot read model file: %s" % path) from exc

    lines = raw.splitlines()
    if not lines:
        raise FormatError("model file %s is empty" % path)
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MODEL_MAGIC:
        raise FormatError("model file %s: bad header" % path)
    if magic[1] != str(MODEL_VERSION):
        raise FormatError("model file %s: unsupported version %s" % (path, magic[1]))

    try:
        it = iter(lines[1:])
        c = float(_expect(next(it).split(), "c", path)[0])
        epsilon = float(_expect(next(it).split(), "epsilon", path)[0])
        gamma = float(_expect(next(it).split(), "gamma", path)[0])
        bias = float(_expect(next(it).split(), "bias", path)[0])
        n_features = int(_expect(next(it).split(), "n_features", path)[0])
        names = tuple(_expect(next(it).split(), "names", path)[0].split(","))
        mins = np.array([float(v) for v in _expect(next(it).split(), "scaler_min", path)])
        maxs = np.array([float(v) for v in _expect(next(it).split(), "scaler_max", path)])
        n_sv = int(_expect(next(it).split(), "n_sv", path)[0])
        coefs = np.empty(n_sv)
        svs = np.empty((n_sv, n_features))
        for i in range(n_sv):
            fields = _expect(next(it).split(), "sv", path)
            if len(fields) != n_features + 1:
                raise FormatError("model file %s: malformed sv line" % path)
            coefs[i] = float(fields[0])
            svs[i] = [float(v) for v in fields[1:]]
        if next(it).strip() != "end":
            raise FormatError("model file %s: missing end marker" % path)
    except (StopIteration, ValueError, IndexError) as exc:
        raise FormatError("model file %s is truncated or malformed" % path) from exc

    if len(names) != n_features or mins.size != n_features or maxs.size != n_features:
        raise FormatError("model file %s: inconsistent feature counts" % path)
    return SvrModel(
        support_vectors=svs,
        dual_coefs=coefs,
        bias=bias,
        gamma=gamma,
        scaler=FeatureScaler(mins=mins, maxs=maxs),
        params=SvrParams(c=c, epsilon=epsilon, gamma=gamma),
        feature_names=names,
    )
