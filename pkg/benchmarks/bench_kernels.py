#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 10000] [--repeats 5]

Covers the four hot kernels plus a bootstrap-shaped composite (resample,
rank, trim, bucket) that dominates pipeline runtime.
"""

import argparse
import time

import numpy as np

from incomeatlas._kernels import _pykernels

try:
    from incomeatlas._kernels import _ckernels
except ImportError:
    _ckernels = None

from incomeatlas import segment


def timed(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def composite_bootstrap(values, weights, B=50):
    n = values.size
    for r in range(B):
        rng = np.random.default_rng(np.random.SeedSequence((0, r)))
        idx = rng.integers(0, n, size=n)
        ranked = segment.percentile_ranks(values[idx], weights[idx])
        segment.build_buckets(segment.trim(ranked).frame, "decile")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(1)
    x = rng.lognormal(10.5, 0.8, args.n)
    w = rng.uniform(500, 2500, args.n)
    order = np.argsort(x, kind="stable")
    xs, ws = x[order], w[order]
    shares = np.asarray(_pykernels.cumshare(ws))
    lows = np.array([(k - 1) / 100.0 for k in range(5, 96)])
    highs = np.array([k / 100.0 for k in range(5, 96)])

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled kernels unavailable; benchmarking the fallback only")

    cases = {
        "cumshare": lambda be: be.cumshare(ws),
        "gini_pair_sum": lambda be: be.gini_pair_sum(x, w),
        "gini_sorted_sum": lambda be: be.gini_sorted_sum(xs, ws),
        "band_max": lambda be: be.band_max(xs, shares, lows, highs),
    }

    print(f"n = {args.n}, best of {args.repeats}")
    header = f"{'kernel':<18}" + "".join(f"{name:>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn in cases.items():
        times = [timed(lambda be=be: fn(be), args.repeats) for _name, be in backends]
        row = f"{label:<18}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    # end-to-end composite through the segment module per active backend
    import importlib
    import os

    composite_times = []
    for env_value in ("1", ""):
        os.environ["INCOMEATLAS_PURE_PYTHON"] = env_value
        import incomeatlas._kernels as kernel_pkg

        importlib.reload(kernel_pkg)
        importlib.reload(segment)
        composite_times.append(
            (kernel_pkg.BACKEND, timed(lambda: composite_bootstrap(x, w), max(1, args.repeats // 2)))
        )
        if _ckernels is None:
            break
    os.environ.pop("INCOMEATLAS_PURE_PYTHON", None)
    print()
    for backend_name, t in composite_times:
        print(f"bootstrap composite (50 replicates, {backend_name:<8}): {t * 1e3:>9.1f}ms")


if __name__ == "__main__":
    main()
