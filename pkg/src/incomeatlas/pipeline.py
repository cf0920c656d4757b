"""End-to-end orchestration: microdata + price tables -> keyframe bundles.

Stage order follows the processing graph: ingest, deflate, age-standardize,
segment, assemble. Age standardization happens once per (state, year) at
the population level; subpopulation bundles inherit the standardized
weights (or resampled rows), which keeps tiny subgroups from emptying age
bins. Bundles for different (variant, filter) pairs are independent, so
they fan out across a thread pool; every random stream is keyed by
(seed, fips, year, ...) and results are identical for any --jobs value.
"""

from __future__ import annotations

import gzip
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import agestd, deflate, ingest, layout, metrics, segment
from .errors import DataError
from .model import STANDARD_FILTERS, Variant

ALL_VARIANTS = tuple(v.value for v in Variant)
ALL_FILTERS = tuple(STANDARD_FILTERS)


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration echoed next to every command's outputs."""

    out_dir: str
    microdata_path: str = ""
    cpi_path: str = ""
    rpp_path: str = ""
    rent_path: str = ""
    extract_spec_path: Optional[str] = None
    deflators_path: Optional[str] = None
    years: tuple[int, int] = (1976, 2019)
    reference_year: int = 2019
    variants: tuple[str, ...] = ALL_VARIANTS
    filters: tuple[str, ...] = ALL_FILTERS
    scheme: str = "decile"
    age_mode: str = "reweight"
    age_seed: Optional[int] = None
    bootstrap_b: Optional[int] = None
    bootstrap_seed: Optional[int] = None
    backcast: bool = True
    jobs: int = 1
    gzip: bool = False
    sidecar: bool = False  # also write full-precision copies for audits

    def echo(self, outdir: Path) -> Path:
        path = Path(outdir) / "run_config.json"
        path.write_text(json.dumps(asdict(self), sort_keys=True, indent=1) + "\n")
        return path


def load_bundle_schema() -> dict:
    ref = resources.files("incomeatlas").joinpath(
        "schemas/keyframe-bundle-v1.schema.json"
    )
    return json.loads(ref.read_text())


def validate_bundle_doc(doc: dict, schema: Optional[dict] = None) -> None:
    jsonschema.validate(doc, schema or load_bundle_schema())


def _extract_spec(config: RunConfig) -> ingest.ExtractSpec:
    if config.extract_spec_path:
        return ingest.ExtractSpec.from_json_file(Path(config.extract_spec_path))
    return ingest.ExtractSpec(
        microdata_path=Path(config.microdata_path),
        cpi_path=Path(config.cpi_path),
        rpp_path=Path(config.rpp_path),
        rent_path=Path(config.rent_path),
    )


@dataclass
class _Prepared:
    """Shared read-only state consumed by every bundle build."""

    table: ingest.MicrodataTable
    deflators: deflate.DeflatorSet
    cells: dict[tuple[int, int], np.ndarray]  # (fips, year) -> row indices
    std_indices: dict[tuple[int, int], np.ndarray]
    std_weights: dict[tuple[int, int], np.ndarray]
    filter_masks: dict[str, np.ndarray]
    hhat: dict[str, np.ndarray]  # variant -> adjusted income per table row
    variant_years: dict[str, list[int]]
    age_target: Optional[agestd.AgeTarget]


def _group_cells(table: ingest.MicrodataTable) -> dict[tuple[int, int], np.ndarray]:
    keys = table.fips.astype(np.int64) * 10000 + table.year
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(np.diff(sorted_keys)) + 1
    groups = np.split(order, boundaries)
    return {
        (int(k // 10000), int(k % 10000)): idx
        for k, idx in zip(sorted_keys[np.concatenate([[0], boundaries])], groups)
    }


def _filter_mask(table: ingest.MicrodataTable, name: str) -> np.ndarray:
    f = STANDARD_FILTERS[name]
    mask = np.ones(len(table), dtype=bool)
    if f.sex is not None:
        mask &= table.sex == f.sex
    if f.black is not None:
        mask &= table.black == f.black
    if f.hispanic is not None:
        mask &= table.hispanic == f.hispanic
    if f.edu_band == "le12":
        mask &= table.edu_years <= 12
    elif f.edu_band == "gt12":
        mask &= table.edu_years > 12
    return mask


def _adjusted_income(
    table: ingest.MicrodataTable,
    deflators: deflate.DeflatorSet,
    variant: Variant,
) -> np.ndarray:
    """Vectorized income adjustment; one divisor product per row, then one
    division, so the un-adjustment roundtrip stays within an ulp. Rows in
    years a variant cannot cover come out NaN and are excluded upstream."""
    active = deflate.VARIANT_NORMALIZERS[variant]
    divisor = np.ones(len(table))
    if "C" in active:
        year_list = sorted(deflators.cpi_factor)
        factors = np.array([deflators.cpi_factor[y] for y in year_list])
        divisor = divisor * factors[np.searchsorted(year_list, table.year)]
    if "R" in active:
        states = deflators.states()
        missing = sorted(set(table.states()) - set(states))
        if missing:
            raise DataError(f"parity panel does not cover states (fips): {missing}")
        year_list = sorted({y for (_f, y) in deflators.rpp_full})
        parity = np.full((len(states), len(year_list)), np.nan)
        for (f, y), value in deflators.rpp_full.items():
            parity[states.index(f), year_list.index(y)] = value
        rows = np.searchsorted(states, table.fips)
        cols = np.searchsorted(year_list, table.year)
        in_range = np.isin(table.year, year_list)
        values = np.full(len(table), np.nan)
        values[in_range] = parity[rows[in_range], cols[in_range]]
        divisor = divisor * (values / 100.0)
    if "S" in active:
        divisor = divisor * np.sqrt(table.members.astype(np.float64))
    return table.income / divisor


def prepare(
    config: RunConfig,
    table: ingest.MicrodataTable,
    deflators: deflate.DeflatorSet,
) -> _Prepared:
    """Build everything shared across bundles: grouped cells, standardized
    weights, filter masks, and per-variant adjusted incomes."""
    y0, y1 = config.years
    cells = {
        key: idx for key, idx in _group_cells(table).items() if y0 <= key[1] <= y1
    }
    if not cells:
        raise DataError("no microdata rows inside the configured year range")

    # population-level age standardization, shared by every bundle
    age_target = None
    std_indices: dict[tuple[int, int], np.ndarray] = {}
    std_weights: dict[tuple[int, int], np.ndarray] = {}
    if config.age_mode != "none":
        pooled = agestd.AdjustedFrame(
            cells={
                key: agestd.FrameCell(
                    values=table.income[idx],
                    weights=table.weight[idx],
                    ages=table.age[idx],
                )
                for key, idx in cells.items()
            }
        )
        age_target = agestd.build_target(pooled)
        for key, idx in cells.items():
            local, new_w = agestd.standardize_arrays(
                table.age[idx],
                table.weight[idx],
                age_target,
                mode=config.age_mode,
                seed=config.age_seed,
                stream_key=key,
            )
            std_indices[key] = idx[local]
            std_weights[key] = new_w
    else:
        for key, idx in cells.items():
            std_indices[key] = idx
            std_weights[key] = table.weight[idx]

    filter_masks = {name: _filter_mask(table, name) for name in config.filters}

    rpp_years = sorted({y for (_f, y) in deflators.rpp_full})
    variant_years: dict[str, list[int]] = {}
    hhat: dict[str, np.ndarray] = {}
    data_years = sorted({y for (_f, y) in cells})
    for name in config.variants:
        variant = Variant(name)
        if "R" in deflate.VARIANT_NORMALIZERS[variant]:
            years = [y for y in data_years if y in rpp_years]
        else:
            years = data_years
        if config.reference_year not in years:
            raise DataError(
                f"variant {name}: no coverage for the reference year {config.reference_year}"
            )
        variant_years[name] = years
        hhat[name] = _adjusted_income(table, deflators, variant)

    return _Prepared(
        table=table,
        deflators=deflators,
        cells=cells,
        std_indices=std_indices,
        std_weights=std_weights,
        filter_masks=filter_masks,
        hhat=hhat,
        variant_years=variant_years,
        age_target=age_target,
    )


def build_bundle(
    config: RunConfig,
    prepared: _Prepared,
    variant_name: str,
    filter_name: str,
) -> layout.KeyframeBundle:
    """Segment one (variant, filter) pass and assemble its keyframes."""
    hhat = prepared.hhat[variant_name]
    mask = prepared.filter_masks[filter_name]
    years = prepared.variant_years[variant_name]
    deflators = prepared.deflators

    cell_values: dict[tuple[int, int], np.ndarray] = {}
    cell_weights: dict[tuple[int, int], np.ndarray] = {}
    for key in prepared.cells:
        if key[1] not in years:
            continue
        idx = prepared.std_indices[key]
        keep = mask[idx]
        cell_values[key] = hhat[idx[keep]]
        cell_weights[key] = prepared.std_weights[key][keep]

    # a state must be present in every year to stay renderable
    dropped = sorted(
        {f for (f, _y), v in cell_values.items() if v.size == 0 or not cell_weights[(f, _y)].sum() > 0}
    )
    if dropped:
        cell_values = {k: v for k, v in cell_values.items() if k[0] not in dropped}
        cell_weights = {k: v for k, v in cell_weights.items() if k[0] not in dropped}
    if not cell_values:
        raise DataError(
            f"filter {filter_name!r} leaves no populated states to render"
        )

    medians = {
        key: segment.weighted_median(values, cell_weights[key])
        for key, values in cell_values.items()
    }
    ref_year = config.reference_year
    ref_values = np.concatenate(
        [v for (f, y), v in sorted(cell_values.items()) if y == ref_year]
    )
    ref_weights = np.concatenate(
        [cell_weights[k] for k in sorted(cell_weights) if k[1] == ref_year]
    )
    reference_median = segment.weighted_median(ref_values, ref_weights)
    positions = layout.benchmark_positions(medians, reference_median)
    ranks = {year: layout.rank_states(medians, year) for year in years}
    thickness_by_year = {
        year: layout.thickness(
            {
                f: float(cell_weights[(f, y)].sum())
                for (f, y) in cell_weights
                if y == year
            }
        )
        for year in years
    }

    buckets: dict[tuple[int, int], list[segment.Bucket]] = {}
    counts: dict[tuple[int, int], int] = {}
    reports: dict[tuple[int, int], metrics.BootstrapReport] = {}
    for key, values in cell_values.items():
        ranked = segment.percentile_ranks(values, cell_weights[key])
        trimmed = segment.trim(ranked)
        buckets[key] = segment.build_buckets(trimmed.frame, config.scheme)
        counts[key] = trimmed.frame.values.size
        if config.bootstrap_b:
            reports[key] = metrics.bootstrap_se(
                values,
                cell_weights[key],
                scheme=config.scheme,
                B=config.bootstrap_b,
                seed=config.bootstrap_seed,
                stream_key=(key[0], key[1]),
            )

    states = sorted({f for (f, _y) in cell_values})
    metadata = {
        "reference_year": ref_year,
        "reference_median": layout.round_sig(reference_median),
        "age_mode": config.age_mode if config.age_mode != "none" else None,
        "age_seed": config.age_seed,
        "bootstrap": (
            {"B": config.bootstrap_b, "seed": config.bootstrap_seed}
            if config.bootstrap_b
            else None
        ),
        "deflators": {
            "rpp_observed_from": deflators.rpp_observed_from,
            "backcast": deflators.model is not None,
        },
        "states": [
            {"fips": f, "state": layout.FIPS_TO_CODE.get(f, str(f))} for f in states
        ],
    }
    if dropped:
        metadata["dropped_states"] = dropped

    backcast_years = {
        y for y in years if deflators.year_has_backcast(y)
    } if "R" in deflate.VARIANT_NORMALIZERS[Variant(variant_name)] else set()

    return layout.assemble(
        variant=variant_name,
        filter_name=filter_name,
        scheme=config.scheme,
        buckets=buckets,
        positions=positions,
        ranks=ranks,
        thickness_by_year=thickness_by_year,
        counts=counts,
        metadata=metadata,
        bootstrap=reports or None,
        rpp_backcast_years=backcast_years,
    )


def run_pipeline(config: RunConfig) -> dict[str, Path]:
    """Execute the full pipeline and write bundles + manifest + config echo."""
    outdir = Path(config.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = _extract_spec(config)
    table, report = ingest.load_microdata(spec, config.years)
    if len(table) == 0:
        raise DataError("no valid microdata rows")

    if config.deflators_path:
        deflators = deflate.DeflatorSet.from_json(Path(config.deflators_path).read_text())
    else:
        tables = ingest.load_price_tables(spec, config.years)
        deflators = deflate.build_deflators(
            tables, range(config.years[0], config.years[1] + 1),
            reference_year=config.reference_year, backcast=config.backcast,
        )
        (outdir / "deflators.json").write_text(deflators.to_json())

    if config.age_mode == "resample" and config.age_seed is None:
        raise DataError("age resample mode requires --age-seed")
    if config.bootstrap_b and config.bootstrap_seed is None:
        raise DataError("bootstrap requires --bootstrap-seed")

    prepared = prepare(config, table, deflators)
    if prepared.age_target is not None:
        (outdir / "age_target.json").write_text(prepared.age_target.to_json() + "\n")
    schema = load_bundle_schema()

    tasks = [(v, f) for v in config.variants for f in config.filters]

    def build(task: tuple[str, str]) -> tuple[str, str, bytes, bytes | None, list[int]]:
        variant_name, filter_name = task
        bundle = build_bundle(config, prepared, variant_name, filter_name)
        doc = layout.bundle_to_doc(bundle)
        validate_bundle_doc(doc, schema)
        payload = layout.serialize_bundle(bundle)
        full = layout.serialize_bundle(bundle, full_precision=True) if config.sidecar else None
        return variant_name, filter_name, payload, full, sorted(bundle.years)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(build, tasks))
    else:
        results = [build(t) for t in tasks]

    written: dict[str, Path] = {}
    manifest_entries = []
    for variant_name, filter_name, payload, full, years in sorted(
        results, key=lambda r: (r[0], r[1])
    ):
        name = layout.bundle_filename(variant_name, filter_name, config.gzip)
        path = outdir / name
        if config.gzip:
            # fixed mtime keeps the gzip container deterministic
            path.write_bytes(gzip.compress(payload, mtime=0))
        else:
            path.write_bytes(payload)
        if full is not None:
            sidecar_dir = outdir / "sidecar"
            sidecar_dir.mkdir(exist_ok=True)
            (sidecar_dir / layout.bundle_filename(variant_name, filter_name)).write_bytes(full)
        written[name] = path
        manifest_entries.append(
            {
                "variant": variant_name,
                "filter": filter_name,
                "path": name,
                "scheme": config.scheme,
                "years": years,
            }
        )
    layout.write_manifest(manifest_entries, outdir)
    config.echo(outdir)
    (outdir / "ingest_report.json").write_text(
        json.dumps(
            {
                "total_rows": report.total_rows,
                "accepted": report.accepted,
                "rejected": report.rejected,
                "by_reason": report.by_reason,
            },
            sort_keys=True,
            indent=1,
        )
        + "\n"
    )
    return written
