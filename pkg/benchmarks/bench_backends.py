#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot paths on realistic sizes: 7x7 local statistics and the
Canny NMS + hysteresis stages on a 1024x1024 plane, and the SMO solver on a
400-sample RBF regression. Run after building the extension:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np
from scipy import ndimage

from uif._kernels import pykern

try:
    from uif._kernels import _ckern
except ImportError:
    _ckern = None


def best_of(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(0)

    plane = ndimage.gaussian_filter(rng.random((1024, 1024)) * 255, 2.0)
    gx = ndimage.sobel(plane, axis=1, mode="reflect")
    gy = ndimage.sobel(plane, axis=0, mode="reflect")
    mag = np.hypot(gx, gy)
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    sector = (((angle + 22.5) // 45.0) % 4).astype(np.int8)
    nonzero = mag[mag > 0]
    high = float(np.quantile(nonzero, 0.7))
    cand = pykern.canny_nms(mag, sector)
    weak = cand & (mag >= 0.4 * high)
    strong = cand & (mag >= high)

    n = 400
    x = rng.normal(size=(n, 11))
    y = x @ rng.normal(size=11) + 0.1 * rng.normal(size=n)
    sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)
    gram = np.exp(-0.05 * sq)

    cases = [
        ("box_stats 1024^2 r=3", lambda impl: impl.box_stats(plane, 3)),
        ("canny_nms 1024^2", lambda impl: impl.canny_nms(mag, sector)),
        ("hysteresis 1024^2", lambda impl: impl.hysteresis(weak, strong)),
        ("smo_solve n=400", lambda impl: impl.smo_solve(gram, y, 10.0, 0.01, 1e-3, 10**6)),
    ]

    print("%-22s %12s %12s %9s" % ("kernel", "python [ms]", "compiled [ms]", "speedup"))
    for name, call in cases:
        t_py = best_of(lambda: call(pykern))
        if _ckern is None:
            print("%-22s %12.2f %12s %9s" % (name, t_py * 1e3, "n/a", "n/a"))
            continue
        t_c = best_of(lambda: call(_ckern))
        print(
            "%-22s %12.2f %12.2f %8.1fx"
            % (name, t_py * 1e3, t_c * 1e3, t_py / t_c if t_c > 0 else float("inf"))
        )
    if _ckern is None:
        print("\ncompiled kernels not built; showing the numpy fallback only")


if __name__ == "__main__":
    main()
