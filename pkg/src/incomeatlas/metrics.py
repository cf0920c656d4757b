"""Inequality metrics and bootstrap standard errors for bucket heights.

``gini_naive`` evaluates the exact pairwise double sum and serves as the
oracle; ``gini_sorted`` is the O(n log n) rearrangement that must agree with
it. Bootstrap replicates reuse the segment module's rank/trim/bucket code
paths verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels, segment
from .errors import NumericError


@dataclass(frozen=True)
class GiniResult:
    g: float
    n: int
    method: str


@dataclass(frozen=True)
class BucketSE:
    k: int
    estimate: Optional[float]
    se: Optional[float]  # None when the bucket had no height to resample


@dataclass(frozen=True)
class BootstrapReport:
    """Bootstrap SEs per bucket for one state-year frame."""

    replicates: int
    seed: int
    scheme: str
    buckets: list[BucketSE]

    def se_by_k(self) -> dict[int, float]:
        return {b.k: b.se for b in self.buckets if b.se is not None}


def _prepare(x, w, allow_negative: bool):
    xa = np.asarray(x, dtype=np.float64)
    if xa.ndim != 1 or xa.size < 1:
        raise ValueError("income vector must be 1-d and nonempty")
    if w is None:
        wa = np.ones_like(xa)
    else:
        wa = np.asarray(w, dtype=np.float64)
        if wa.shape != xa.shape:
            raise ValueError("weights must match incomes in shape")
        if np.any(wa < 0):
            raise ValueError("weights must be nonnegative")
    if not allow_negative and np.any(xa < 0):
        raise ValueError(
            "negative incomes rejected by default; pass allow_negative=True to override"
        )
    total_w = float(np.sum(wa))
    if not total_w > 0:
        raise NumericError("Gini undefined for zero total weight")
    mean = float(np.sum(xa * wa)) / total_w
    if mean == 0:
        raise NumericError("Gini undefined for zero-mean input")
    return xa, wa, total_w, mean


def gini_naive(x, w=None, allow_negative: bool = False) -> GiniResult:
    """Exact O(n^2) double-sum Gini; the weighted form uses w_i*w_j pair mass."""
    xa, wa, total_w, mean = _prepare(x, w, allow_negative)
    pair = _kernels.gini_pair_sum(xa, wa)
    g = pair / (2.0 * total_w * total_w * mean)
    return GiniResult(g=g, n=xa.size, method="naive")


def gini_sorted(x, w=None, allow_negative: bool = False) -> GiniResult:
    """O(n log n) Gini via the sorted cumulative-weight rearrangement."""
    xa, wa, total_w, mean = _prepare(x, w, allow_negative)
    order = np.argsort(xa, kind="stable")
    s = _kernels.gini_sorted_sum(xa[order], wa[order])
    g = s / (total_w * total_w * mean)
    return GiniResult(g=g, n=xa.size, method="sorted")


def lorenz_points(x, w=None) -> np.ndarray:
    """Piecewise-linear Lorenz curve: (population share, income share) rows.

    Starts at (0, 0) and ends at (1, 1); twice the area between the diagonal
    and this polyline equals the Gini coefficient.
    """
    xa = np.asarray(x, dtype=np.float64)
    if xa.ndim != 1 or xa.size < 1:
        raise ValueError("income vector must be 1-d and nonempty")
    if np.any(xa < 0):
        raise ValueError("Lorenz curve requires nonnegative incomes")
    if w is None:
        wa = np.ones_like(xa)
    else:
        wa = np.asarray(w, dtype=np.float64)
        if np.any(wa < 0):
            raise ValueError("weights must be nonnegative")
    order = np.argsort(xa, kind="stable")
    xs = xa[order]
    ws = wa[order]
    total_w = float(np.sum(ws))
    total_income = float(np.sum(xs * ws))
    if not total_w > 0:
        raise NumericError("Lorenz curve undefined for zero total weight")
    if not total_income > 0:
        raise NumericError("Lorenz curve undefined for nonpositive total income")
    pop = np.concatenate([[0.0], np.cumsum(ws) / total_w])
    inc = np.concatenate([[0.0], np.cumsum(xs * ws) / total_income])
    return np.column_stack([pop, inc])


def bootstrap_se(
    values,
    weights,
    scheme: str = "decile",
    B: int = 500,
    seed: Optional[int] = None,
    stream_key: tuple[int, ...] = (),
) -> BootstrapReport:
    """Bootstrap SEs of bucket heights for one state-year frame.

    Each replicate redraws n households out of n with replacement (uniform
    draw probability, weights carried along), then re-runs rank -> trim ->
    buckets. The SE is the sample standard deviation of each k's height
    across replicates. Replicate r draws from a stream seeded by
    (seed, *stream_key, r), so results do not depend on evaluation order;
    ``stream_key`` decorrelates cells sharing one run-level seed.
    """
    if seed is None:
        raise ValueError("bootstrap requires an explicit seed")
    if B < 2:
        raise ValueError("bootstrap requires B >= 2 replicates")
    v = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if v.size == 0:
        raise ValueError("bootstrap requires a nonempty frame")
    n = v.size

    ks = segment.BUCKET_SCHEMES[scheme]
    point = _heights(v, w, scheme)
    draws = np.full((B, len(ks)), np.nan)
    for r in range(B):
        rng = np.random.default_rng(np.random.SeedSequence((seed, *stream_key, r)))
        idx = rng.integers(0, n, size=n)
        draws[r] = _heights(v[idx], w[idx], scheme)

    buckets = []
    for j, k in enumerate(ks):
        col = draws[:, j]
        ok = ~np.isnan(col)
        # replicates where the bucket was missing carry no height draw
        se = float(np.std(col[ok], ddof=1)) if int(np.sum(ok)) >= 2 else None
        est = None if np.isnan(point[j]) else float(point[j])
        buckets.append(BucketSE(k=k, estimate=est, se=se))
    return BootstrapReport(replicates=B, seed=seed, scheme=scheme, buckets=buckets)


def _heights(values, weights, scheme: str) -> np.ndarray:
    ranked = segment.percentile_ranks(values, weights)
    trimmed = segment.trim(ranked)
    heights = [b.height for b in segment.build_buckets(trimmed.frame, scheme)]
    return np.array([np.nan if h is None else h for h in heights])
