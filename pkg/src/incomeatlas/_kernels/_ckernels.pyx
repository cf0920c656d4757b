# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cumulative weight shares, pairwise Gini sums,
and per-band maxima. Semantics must match ``_pykernels`` exactly."""

import numpy as np

BACKEND_NAME = "compiled"


def cumshare(weights_sorted):
    """Cumulative weight share of each entry: cumsum(w) / total."""
    cdef double[::1] w = np.ascontiguousarray(weights_sorted, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += w[i]
        out[i] = acc
    cdef double total = acc
    for i in range(n):
        out[i] = out[i] / total
    return out_arr


def gini_pair_sum(values, weights):
    """Sum over all pairs of w_i * w_j * |x_i - x_j| (both orders counted)."""
    cdef double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef double total = 0.0
    cdef double d
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(i + 1, n):
            d = x[i] - x[j]
            if d < 0.0:
                d = -d
            total += w[i] * w[j] * d
    return 2.0 * total


def gini_sorted_sum(values_sorted, weights_sorted):
    """Pair-sum equivalent from ascending-sorted input, in O(n).

    Returns S = sum_k x_k * w_k * (2*C_k - w_k - W) with C_k the inclusive
    cumulative weight; S equals half of ``gini_pair_sum`` on the same data.
    """
    cdef double[::1] x = np.ascontiguousarray(values_sorted, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights_sorted, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total += w[i]
    cdef double acc = 0.0
    cdef double s = 0.0
    for i in range(n):
        acc += w[i]
        s += x[i] * w[i] * (2.0 * acc - w[i] - total)
    return s


def band_max(values_sorted, shares, lows, highs):
    """Max value and count inside each closed band [lo, hi] of the shares.

    Bands must be in ascending order of lo; empty bands yield NaN / count 0.
    """
    cdef double[::1] v = np.ascontiguousarray(values_sorted, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(shares, dtype=np.float64)
    cdef double[::1] lo = np.ascontiguousarray(lows, dtype=np.float64)
    cdef double[::1] hi = np.ascontiguousarray(highs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t nb = lo.shape[0]
    heights_arr = np.full(nb, np.nan)
    counts_arr = np.zeros(nb, dtype=np.int64)
    cdef double[::1] heights = heights_arr
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t b, i0, i1, mid
    for b in range(nb):
        # bisect_left(p, lo[b])
        i0 = 0
        i1 = n
        while i0 < i1:
            mid = (i0 + i1) // 2
            if p[mid] < lo[b]:
                i0 = mid + 1
            else:
                i1 = mid
        # bisect_right(p, hi[b]) from i0
        i1 = n
        mid = i0
        while mid < i1:
            # reuse mid as low cursor of the second bisect
            if p[(mid + i1) // 2] <= hi[b]:
                mid = (mid + i1) // 2 + 1
            else:
                i1 = (mid + i1) // 2
        if mid > i0:
            counts[b] = mid - i0
            heights[b] = v[mid - 1]
    return heights_arr, counts_arr
