"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``_ckern``, Cython) is preferred when it imported
cleanly; otherwise the numpy implementations in ``pykern`` are used. Set
``UIF_BACKEND=python`` to force the fallback or ``UIF_BACKEND=c`` to require
the extension (raises if it is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

from . import pykern

_forced = os.environ.get("UIF_BACKEND", "").strip().lower()
if _forced in ("python", "py"):
    _ckern = None
elif _forced in ("", "c", "compiled", "cython"):
    try:
        from . import _ckern
    except ImportError:
        if _forced:
            raise ImportError(
                "UIF_BACKEND=%s but the compiled kernels are not built" % _forced
            )
        _ckern = None
else:
    raise ImportError("unknown UIF_BACKEND value: %r" % _forced)

BACKEND = "compiled" if _ckern is not None else "python"
_impl = _ckern if _ckern is not None else pykern


def backend_name() -> str:
    return BACKEND


def box_stats(plane: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
    return _impl.box_stats(np.ascontiguousarray(plane, dtype=np.float64), radius)


def canny_nms(mag: np.ndarray, sector: np.ndarray) -> np.ndarray:
    return _impl.canny_nms(mag, sector)


def hysteresis(weak: np.ndarray, strong: np.ndarray) -> np.ndarray:
    return _impl.hysteresis(weak, strong)


def smo_solve(gram, y, c, epsilon, tol, max_iter):
    # The compiled solver only handles a dense Gram matrix; column-provider
    # objects (large problems) always go through the numpy path.
    if _ckern is not None and isinstance(gram, np.ndarray):
        return _ckern.smo_solve(gram, y, c, epsilon, tol, max_iter)
    return pykern.smo_solve(gram, y, c, epsilon, tol, max_iter)
