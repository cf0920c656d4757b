"""Age standardization of state-year frames.

Cross-state income comparisons are confounded when states age at different
speeds, so every frame is pushed toward one common age distribution: the
pooled weighted distribution over all states and years. Reweighting is the
default (deterministic and exactly testable); resampling draws households
bin-by-bin with replacement. Neither mode touches any adjusted income
value, only weights or multiplicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError

# 5-year bins from 15 to 85+, with an under-15 catch-all so every valid age
# (0..120) lands in a bin. Edges are left-closed; the last bin is open-ended.
DEFAULT_AGE_EDGES = tuple([0] + list(range(15, 90, 5)))


@dataclass(frozen=True)
class AgeTarget:
    """Bin edges plus the target share of weight per bin (shares sum to 1)."""

    edges: tuple[int, ...]
    shares: tuple[float, ...]

    def __post_init__(self):
        if len(self.shares) != len(self.edges):
            raise ValueError("need one share per bin (edges are left edges)")
        if any(s < 0 for s in self.shares):
            raise ValueError("target shares must be nonnegative")
        if abs(sum(self.shares) - 1.0) > 1e-12:
            raise ValueError("target shares must sum to 1")

    def bin_of(self, ages) -> np.ndarray:
        return np.searchsorted(np.asarray(self.edges), np.asarray(ages), side="right") - 1

    def label(self, i: int) -> str:
        if i == len(self.edges) - 1:
            return f"{self.edges[i]}+"
        return f"{self.edges[i]}-{self.edges[i + 1] - 1}"

    def to_json(self) -> str:
        return json.dumps(
            {"edges": list(self.edges), "shares": list(self.shares)}, sort_keys=True
        )

    @classmethod
    def from_json(cls, text: str) -> "AgeTarget":
        doc = json.loads(text)
        return cls(edges=tuple(doc["edges"]), shares=tuple(doc["shares"]))


@dataclass(frozen=True)
class FrameCell:
    """Adjusted incomes, weights, and ages for one (fips, year)."""

    values: np.ndarray
    weights: np.ndarray
    ages: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class AdjustedFrame:
    """All state-year cells of one variant/filter pass, with provenance."""

    cells: dict[tuple[int, int], FrameCell]
    provenance: str = "raw"


def build_target(frame: AdjustedFrame, edges: tuple[int, ...] = DEFAULT_AGE_EDGES) -> AgeTarget:
    """Pooled weighted age-bin shares across every state-year in the frame."""
    if not frame.cells:
        raise DataError("cannot build an age target from an empty frame")
    totals = np.zeros(len(edges))
    edge_arr = np.asarray(edges)
    for cell in frame.cells.values():
        bins = np.searchsorted(edge_arr, cell.ages, side="right") - 1
        totals += np.bincount(bins, weights=cell.weights, minlength=len(edges))
    grand = totals.sum()
    if not grand > 0:
        raise DataError("cannot build an age target from zero total weight")
    shares = totals / grand
    # renormalize away the last-digit float residue so shares sum to 1 exactly
    shares = shares / shares.sum()
    return AgeTarget(edges=edges, shares=tuple(float(s) for s in shares))


def standardize_arrays(
    ages: np.ndarray,
    weights: np.ndarray,
    target: AgeTarget,
    mode: str = "reweight",
    seed: Optional[int] = None,
    stream_key: tuple[int, ...] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """Standardize one cell given its ages and weights.

    Returns (row indices, new weights): reweight keeps every row (indices
    0..n-1) and multiplies each weight by target_share/observed_share of
    its bin, preserving the total; resample returns n draws with
    replacement (bins by target share, households within a bin by weight)
    with uniform weights totalling the original. ``stream_key`` (e.g.
    (fips, year)) isolates the random stream per cell so results do not
    depend on scheduling.
    """
    ages = np.asarray(ages)
    weights = np.asarray(weights, dtype=np.float64)
    bins = target.bin_of(ages)
    observed = np.bincount(bins, weights=weights, minlength=len(target.shares))
    total = float(weights.sum())
    shares = np.asarray(target.shares)
    missing = (shares > 0) & (observed <= 0)
    if np.any(missing):
        labels = [target.label(i) for i in np.flatnonzero(missing)]
        raise DataError(
            "age bins required by the target are empty in this frame: " + ", ".join(labels)
        )

    n = ages.size
    if mode == "reweight":
        observed_share = np.divide(
            observed, total, out=np.zeros_like(observed), where=observed > 0
        )
        multipliers = np.divide(
            shares, observed_share, out=np.zeros_like(shares), where=observed_share > 0
        )
        return np.arange(n), weights * multipliers[bins]
    if mode == "resample":
        if seed is None:
            raise DataError("resample mode requires a seed")
        rng = np.random.default_rng(np.random.SeedSequence((seed, *stream_key)))
        counts = rng.multinomial(n, shares)
        chosen = np.empty(n, dtype=np.int64)
        pos = 0
        for b in np.flatnonzero(counts):
            members = np.flatnonzero(bins == b)
            p = weights[members] / weights[members].sum()
            chosen[pos : pos + counts[b]] = rng.choice(members, size=counts[b], p=p)
            pos += counts[b]
        return chosen, np.full(n, total / n)
    raise ValueError(f"unknown standardization mode {mode!r}")


def standardize_cell(
    cell: FrameCell,
    target: AgeTarget,
    mode: str = "reweight",
    seed: Optional[int] = None,
    stream_key: tuple[int, ...] = (),
) -> FrameCell:
    """Standardize one cell's age distribution to the target.

    Never alters any adjusted income value, only weights or multiplicity.
    """
    idx, new_weights = standardize_arrays(
        cell.ages, cell.weights, target, mode=mode, seed=seed, stream_key=stream_key
    )
    return FrameCell(values=cell.values[idx], weights=new_weights, ages=cell.ages[idx])


def standardize(
    frame: AdjustedFrame,
    target: AgeTarget,
    mode: str = "reweight",
    seed: Optional[int] = None,
) -> AdjustedFrame:
    """Standardize every cell; cells are independent and order-insensitive."""
    cells = {
        key: standardize_cell(cell, target, mode=mode, seed=seed, stream_key=key)
        for key, cell in frame.cells.items()
    }
    tag = f"age-standardized({mode}, seed={seed})"
    return AdjustedFrame(cells=cells, provenance=tag)
