"""Weighted percentile ranks, tail trimming, and percentile buckets.

The rank of a household is its cumulative weight share after sorting by
adjusted income ascending (ties keep input order). Ranks are computed once
on the full frame; the trim and the buckets both consume those same ranks.
Every quantile-style computation in the package routes through here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import NumericError

# Bucket percentile points (percent units). A bucket at k spans the band
# [(k-1)/100, k/100] of cumulative weight share; its height is the maximum
# adjusted income inside the band. The decile list keeps 50 alongside the
# ten-apart points.
DECILE_KS = tuple(list(range(5, 46, 10)) + [50] + list(range(55, 96, 10)))
PERCENTILE_KS = tuple(range(5, 96))

BUCKET_SCHEMES = {
    "decile": DECILE_KS,
    "percentile": PERCENTILE_KS,
}

TRIM_LOW = 0.05
TRIM_HIGH = 0.95


@dataclass(frozen=True)
class RankedFrame:
    """State-year entries sorted by value ascending, with rank shares.

    ``order`` maps sorted position -> original input index, so callers can
    trace households back through the sort.
    """

    values: np.ndarray
    weights: np.ndarray
    shares: np.ndarray
    order: np.ndarray


@dataclass(frozen=True)
class TrimResult:
    frame: RankedFrame
    removed_low: int
    removed_high: int

    @property
    def empty(self) -> bool:
        return self.frame.values.size == 0


@dataclass(frozen=True)
class Bucket:
    k: int
    height: Optional[float]
    n: int
    carried: bool

    @property
    def missing(self) -> bool:
        return self.height is None


def percentile_ranks(values, weights) -> RankedFrame:
    """Rank households by value; share = cumulative weight / total weight.

    Ties in value keep input order (stable sort), which cannot change any
    bucket height (a band of equal values has one maximum).
    """
    v = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if v.shape != w.shape or v.ndim != 1:
        raise ValueError("values and weights must be 1-d and equally sized")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = float(np.sum(w))
    if not total > 0:
        raise NumericError("percentile ranks undefined: total weight is 0")
    order = np.argsort(v, kind="stable")
    v_sorted = v[order]
    w_sorted = w[order]
    shares = np.asarray(_kernels.cumshare(w_sorted))
    return RankedFrame(values=v_sorted, weights=w_sorted, shares=shares, order=order)


def trim(frame: RankedFrame, low: float = TRIM_LOW, high: float = TRIM_HIGH) -> TrimResult:
    """Drop households with rank share strictly below ``low`` or above ``high``.

    The retained entries keep their original rank shares; buckets are
    evaluated against the full-frame ranks, not re-ranked ones.
    """
    below = frame.shares < low
    above = frame.shares > high
    keep = ~(below | above)
    trimmed = RankedFrame(
        values=frame.values[keep],
        weights=frame.weights[keep],
        shares=frame.shares[keep],
        order=frame.order[keep],
    )
    return TrimResult(
        frame=trimmed,
        removed_low=int(np.sum(below)),
        removed_high=int(np.sum(above)),
    )


def build_buckets(frame: RankedFrame, scheme: str = "decile") -> list[Bucket]:
    """Summarize a ranked (normally trimmed) frame at the scheme's k points.

    Empty bands carry the previous k's height and are flagged; a leading
    empty band with no predecessor is flagged missing rather than invented.
    """
    try:
        ks = BUCKET_SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown bucket scheme {scheme!r}") from None
    lows = np.array([(k - 1) / 100.0 for k in ks])
    highs = np.array([k / 100.0 for k in ks])
    heights, counts = _kernels.band_max(frame.values, frame.shares, lows, highs)
    buckets: list[Bucket] = []
    prev_height: Optional[float] = None
    for k, height, n in zip(ks, heights, counts):
        if n > 0:
            prev_height = float(height)
            buckets.append(Bucket(k=k, height=prev_height, n=int(n), carried=False))
        elif prev_height is not None:
            buckets.append(Bucket(k=k, height=prev_height, n=0, carried=True))
        else:
            buckets.append(Bucket(k=k, height=None, n=0, carried=False))
    return buckets


def weighted_median(values, weights) -> float:
    """Fiftieth-percentile value: the first entry whose rank share reaches 0.5."""
    frame = percentile_ranks(values, weights)
    idx = int(np.searchsorted(frame.shares, 0.5, side="left"))
    idx = min(idx, frame.values.size - 1)
    return float(frame.values[idx])
