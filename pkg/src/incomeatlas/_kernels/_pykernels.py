"""Numpy fallback for the hot kernels.

Mirrors ``_ckernels`` exactly: same signatures, same semantics. ``cumshare``
and ``band_max`` are pure index/accumulation logic and produce bit-identical
results on both backends; the Gini sums may differ by float summation order
(covered by the 1e-12 relative tolerance the callers test at).
"""

import numpy as np

BACKEND_NAME = "python"

# Row block size for the pairwise |x_i - x_j| sweep; bounds peak memory at
# ~CHUNK * n doubles.
_CHUNK = 512


def cumshare(weights_sorted):
    """Cumulative weight share of each entry: cumsum(w) / total."""
    w = np.ascontiguousarray(weights_sorted, dtype=np.float64)
    c = np.cumsum(w)
    return c / c[-1]


def gini_pair_sum(values, weights):
    """Sum over all pairs of w_i * w_j * |x_i - x_j| (both orders counted)."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    n = x.shape[0]
    total = 0.0
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        diffs = np.abs(x[start:stop, None] - x[None, :])
        total += float(np.einsum("i,ij,j->", w[start:stop], diffs, w))
    return total


def gini_sorted_sum(values_sorted, weights_sorted):
    """Pair-sum equivalent from ascending-sorted input, in O(n).

    Returns S = sum_k x_k * w_k * (2*C_k - w_k - W) with C_k the inclusive
    cumulative weight; S equals half of ``gini_pair_sum`` on the same data.
    """
    x = np.ascontiguousarray(values_sorted, dtype=np.float64)
    w = np.ascontiguousarray(weights_sorted, dtype=np.float64)
    c = np.cumsum(w)
    total = c[-1]
    return float(np.sum(x * w * (2.0 * c - w - total)))


def band_max(values_sorted, shares, lows, highs):
    """Max value and count inside each closed band [lo, hi] of the shares.

    ``values_sorted`` ascending, ``shares`` non-decreasing (output of
    ``cumshare`` on the same ordering). Empty bands yield NaN and count 0.
    """
    v = np.ascontiguousarray(values_sorted, dtype=np.float64)
    p = np.ascontiguousarray(shares, dtype=np.float64)
    lo = np.asarray(lows, dtype=np.float64)
    hi = np.asarray(highs, dtype=np.float64)
    i0 = np.searchsorted(p, lo, side="left")
    i1 = np.searchsorted(p, hi, side="right")
    counts = (i1 - i0).astype(np.int64)
    heights = np.full(lo.shape[0], np.nan)
    nonempty = counts > 0
    # ascending sort makes the band max its last element
    heights[nonempty] = v[i1[nonempty] - 1]
    counts[~nonempty] = 0
    return heights, counts
