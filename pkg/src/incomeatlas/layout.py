"""Keyframe assembly and the versioned JSON contract for the explorer.

A keyframe is one year's complete renderable description: per state a
benchmark x-position (median adjusted income minus the reference-year
national median), a dense rank, a population thickness normalized so the
year's smallest state is exactly 1, and the bucket heights. Serialization
is deterministic: sorted keys, fixed separators, dollars rounded to six
significant digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DataError
from .metrics import BootstrapReport
from .model import FIPS_TO_CODE
from .segment import Bucket

BUNDLE_SCHEMA_VERSION = "1.0.0"


def benchmark_positions(
    medians: dict[tuple[int, int], float],
    reference_median: float,
) -> dict[tuple[int, int], float]:
    """Distance of each state-year median to the reference-year national
    median; the same yardstick for every year, so movement is real."""
    return {key: value - reference_median for key, value in medians.items()}


def rank_states(
    medians: dict[tuple[int, int], float],
    year: int,
) -> dict[int, int]:
    """Ranks within one year, 1 = lowest median; ties share the rank and
    the next rank skips."""
    rows = sorted(
        ((fips, value) for (fips, y), value in medians.items() if y == year),
        key=lambda kv: (kv[1], kv[0]),
    )
    if not rows:
        raise DataError(f"no medians available for year {year}")
    ranks: dict[int, int] = {}
    prev_value: Optional[float] = None
    prev_rank = 0
    for i, (fips, value) in enumerate(rows, start=1):
        if prev_value is not None and value == prev_value:
            ranks[fips] = prev_rank
        else:
            ranks[fips] = i
            prev_rank = i
            prev_value = value
    return ranks


def thickness(weight_totals: dict[int, float]) -> dict[int, float]:
    """Slice thickness for one year: state weight total over the year's
    minimum total, so the smallest state is exactly 1."""
    if not weight_totals:
        raise DataError("no states to compute thickness for")
    for fips, total in weight_totals.items():
        if not total > 0:
            raise DataError(f"state fips={fips} has nonpositive population weight")
    smallest = min(weight_totals.values())
    return {fips: total / smallest for fips, total in weight_totals.items()}


@dataclass(frozen=True)
class Slice:
    fips: int
    state: str
    benchmark: float
    rank: int
    thickness: float
    n_households: int
    buckets: list[Bucket]
    se_by_k: Optional[dict[int, float]] = None


@dataclass(frozen=True)
class Keyframe:
    year: int
    rpp_backcast: bool
    slices: list[Slice]


@dataclass(frozen=True)
class KeyframeBundle:
    variant: str
    filter_name: str
    scheme: str
    metadata: dict
    years: dict[int, Keyframe]


def round_sig(x: float, digits: int = 6) -> float:
    """Round to significant digits through the shortest-repr path, so the
    serialized literal is stable across platforms."""
    if x == 0 or not np.isfinite(x):
        return float(x)
    return float(f"{x:.{digits}g}")


def assemble(
    variant: str,
    filter_name: str,
    scheme: str,
    buckets: dict[tuple[int, int], list[Bucket]],
    positions: dict[tuple[int, int], float],
    ranks: dict[int, dict[int, int]],
    thickness_by_year: dict[int, dict[int, float]],
    counts: dict[tuple[int, int], int],
    metadata: dict,
    bootstrap: Optional[dict[tuple[int, int], BootstrapReport]] = None,
    rpp_backcast_years: Optional[set[int]] = None,
) -> KeyframeBundle:
    """Assemble keyframes for every year on the (state, year) grid.

    All inputs must cover the same grid; anything missing is a hard error
    naming the cells. Slices are ordered by benchmark ascending (rank and
    state code break ties), and every year must carry the same state set.
    """
    grid = sorted(buckets)
    missing = [key for key in grid if key not in positions]
    if missing:
        raise DataError(f"positions missing cells: {missing[:5]}")
    years = sorted({y for (_f, y) in grid})
    states_per_year = {y: {f for (f, yy) in grid if yy == y} for y in years}
    state_sets = {frozenset(s) for s in states_per_year.values()}
    if len(state_sets) > 1:
        raise DataError("years do not share an identical state set")

    keyframes: dict[int, Keyframe] = {}
    for year in years:
        slices = []
        for fips in sorted(states_per_year[year]):
            key = (fips, year)
            if fips not in thickness_by_year.get(year, {}):
                raise DataError(f"thickness missing cell {key}")
            if fips not in ranks.get(year, {}):
                raise DataError(f"ranks missing cell {key}")
            report = bootstrap.get(key) if bootstrap else None
            slices.append(
                Slice(
                    fips=fips,
                    state=FIPS_TO_CODE.get(fips, str(fips)),
                    benchmark=positions[key],
                    rank=ranks[year][fips],
                    thickness=thickness_by_year[year][fips],
                    n_households=counts.get(key, 0),
                    buckets=buckets[key],
                    se_by_k=report.se_by_k() if report else None,
                )
            )
        slices.sort(key=lambda s: (s.benchmark, s.rank, s.state))
        keyframes[year] = Keyframe(
            year=year,
            rpp_backcast=bool(rpp_backcast_years and year in rpp_backcast_years),
            slices=slices,
        )
    return KeyframeBundle(
        variant=variant,
        filter_name=filter_name,
        scheme=scheme,
        metadata=metadata,
        years=keyframes,
    )


def bundle_to_doc(bundle: KeyframeBundle, full_precision: bool = False) -> dict:
    """Bundle as a JSON-ready dict.

    Dollars are exported at 6 significant digits; ``full_precision`` skips
    the rounding (the test/audit sidecar).
    """
    digits = (lambda x: float(x)) if full_precision else round_sig
    doc_years = {}
    for year, frame in sorted(bundle.years.items()):
        slices = []
        for s in frame.slices:
            buckets = []
            for b in s.buckets:
                entry = {
                    "k": b.k,
                    "height": None if b.height is None else digits(b.height),
                    "carried": b.carried,
                }
                if s.se_by_k is not None and b.k in s.se_by_k:
                    se = s.se_by_k[b.k]
                    if np.isfinite(se):
                        entry["se"] = digits(se)
                buckets.append(entry)
            slices.append(
                {
                    "fips": s.fips,
                    "state": s.state,
                    "benchmark": digits(s.benchmark),
                    "rank": s.rank,
                    "thickness": digits(s.thickness),
                    "n_households": s.n_households,
                    "buckets": buckets,
                }
            )
        doc_years[str(year)] = {
            "year": year,
            "rpp_backcast": frame.rpp_backcast,
            "slices": slices,
        }
    return {
        "schema_version": BUNDLE_SCHEMA_VERSION,
        "kind": "keyframe-bundle",
        "variant": bundle.variant,
        "filter": bundle.filter_name,
        "scheme": bundle.scheme,
        "metadata": bundle.metadata,
        "years": doc_years,
    }


def serialize_bundle(bundle: KeyframeBundle, full_precision: bool = False) -> bytes:
    """Byte-deterministic serialization: same inputs, same bytes."""
    doc = bundle_to_doc(bundle, full_precision=full_precision)
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def bundle_filename(variant: str, filter_name: str, gz: bool = False) -> str:
    suffix = ".json.gz" if gz else ".json"
    return f"keyframes_{variant}_{filter_name}{suffix}"


def write_manifest(entries: list[dict], outdir: Path) -> Path:
    doc = {
        "schema_version": BUNDLE_SCHEMA_VERSION,
        "kind": "manifest",
        "bundles": sorted(entries, key=lambda e: (e["variant"], e["filter"])),
    }
    path = Path(outdir) / "manifest.json"
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path
