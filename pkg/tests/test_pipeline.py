import json

import numpy as np
import pytest

from incomeatlas import deflate, ingest, pipeline, synth
from incomeatlas.errors import DataError


@pytest.fixture(scope="module")
def prepared_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("pipeline")
    config = synth.demo_config(seed=5, n_states=3, years=(2005, 2019), households=400)
    result = synth.generate_synthetic(config)
    synth.write_synthetic(result, base / "data")
    run = pipeline.RunConfig(
        out_dir=str(base / "out"),
        microdata_path=str(base / "data" / "microdata.csv"),
        cpi_path=str(base / "data" / "cpi.csv"),
        rpp_path=str(base / "data" / "rpp.csv"),
        rent_path=str(base / "data" / "rent.csv"),
        years=(2005, 2019),
        variants=("RHH", "ERHHRPP"),
        filters=("all", "female"),
        jobs=2,
    )
    written = pipeline.run_pipeline(run)
    return base, run, written


def load(base, name):
    return json.loads((base / "out" / name).read_text())


def test_bundle_count_and_manifest(prepared_run):
    base, run, written = prepared_run
    assert len(written) == 4  # 2 variants x 2 filters
    manifest = load(base, "manifest.json")
    pairs = {(b["variant"], b["filter"]) for b in manifest["bundles"]}
    assert pairs == {("RHH", "all"), ("RHH", "female"),
                     ("ERHHRPP", "all"), ("ERHHRPP", "female")}


def test_bundles_schema_valid(prepared_run):
    base, _run, written = prepared_run
    schema = pipeline.load_bundle_schema()
    for name in written:
        pipeline.validate_bundle_doc(load(base, name), schema)


def test_identical_state_sets_across_years(prepared_run):
    base, _run, written = prepared_run
    for name in written:
        doc = load(base, name)
        sets = {tuple(s["state"] for s in frame["slices"]) for frame in doc["years"].values()}
        states = {frozenset(t) for t in sets}
        assert len(states) == 1


def test_thickness_minimum_exactly_one(prepared_run):
    base, _run, written = prepared_run
    for name in written:
        doc = load(base, name)
        for frame in doc["years"].values():
            assert min(s["thickness"] for s in frame["slices"]) == 1.0


def test_heights_monotone_in_every_slice(prepared_run):
    base, _run, written = prepared_run
    for name in written:
        doc = load(base, name)
        for frame in doc["years"].values():
            for s in frame["slices"]:
                heights = [b["height"] for b in s["buckets"] if b["height"] is not None]
                assert heights == sorted(heights)


def test_rpp_backcast_flag_only_on_backcast_years(prepared_run):
    base, _run, _written = prepared_run
    doc = load(base, "keyframes_ERHHRPP_all.json")
    for year, frame in doc["years"].items():
        assert frame["rpp_backcast"] == (int(year) < 2008)
    rhh = load(base, "keyframes_RHH_all.json")
    assert all(not f["rpp_backcast"] for f in rhh["years"].values())


def test_filtered_bundle_smaller_population(prepared_run):
    base, _run, _written = prepared_run
    full = load(base, "keyframes_RHH_all.json")
    female = load(base, "keyframes_RHH_female.json")
    year = "2019"
    n_full = {s["state"]: s["n_households"] for s in full["years"][year]["slices"]}
    n_female = {s["state"]: s["n_households"] for s in female["years"][year]["slices"]}
    assert all(n_female[st] < n_full[st] for st in n_full)


def test_age_standardization_changes_weights_not_values(prepared_run):
    base, run, _written = prepared_run
    spec = pipeline._extract_spec(run)
    table, _report = ingest.load_microdata(spec, run.years)
    tables = ingest.load_price_tables(spec, run.years)
    deflators = deflate.build_deflators(
        tables, range(run.years[0], run.years[1] + 1), backcast=True
    )
    prepared = pipeline.prepare(run, table, deflators)
    for key, idx in prepared.cells.items():
        # reweight mode keeps the same households with adjusted weights
        assert np.array_equal(prepared.std_indices[key], idx)
        assert prepared.std_weights[key].sum() == pytest.approx(
            table.weight[idx].sum(), rel=1e-9
        )


def test_resample_mode_preserves_counts(prepared_run):
    base, run, _written = prepared_run
    config = pipeline.RunConfig(**{
        **run.__dict__, "age_mode": "resample", "age_seed": 11,
        "out_dir": str(base / "out_resample"),
        "variants": ("RHH",), "filters": ("all",),
    })
    spec = pipeline._extract_spec(config)
    table, _report = ingest.load_microdata(spec, config.years)
    tables = ingest.load_price_tables(spec, config.years)
    deflators = deflate.build_deflators(
        tables, range(config.years[0], config.years[1] + 1), backcast=True
    )
    prepared = pipeline.prepare(config, table, deflators)
    for key, idx in prepared.cells.items():
        assert prepared.std_indices[key].size == idx.size
        assert prepared.std_weights[key].sum() == pytest.approx(
            table.weight[idx].sum(), rel=1e-9
        )


def test_bootstrap_attaches_se_fields(prepared_run):
    base, run, _written = prepared_run
    config = pipeline.RunConfig(**{
        **run.__dict__,
        "out_dir": str(base / "out_boot"),
        "variants": ("RHH",), "filters": ("all",),
        "years": (2017, 2019),
        "bootstrap_b": 25, "bootstrap_seed": 9,
    })
    written = pipeline.run_pipeline(config)
    doc = json.loads((base / "out_boot" / "keyframes_RHH_all.json").read_text())
    pipeline.validate_bundle_doc(doc)
    slice0 = doc["years"]["2019"]["slices"][0]
    assert any("se" in b for b in slice0["buckets"])
    assert doc["metadata"]["bootstrap"] == {"B": 25, "seed": 9}


def test_run_config_roundtrip(prepared_run):
    base, run, _written = prepared_run
    echoed = json.loads((base / "out" / "run_config.json").read_text())
    assert echoed["years"] == list(run.years)
    assert echoed["scheme"] == run.scheme


def test_rank_paths_cross_before_2000(tmp_path):
    # the small young state's median path overtakes the big state's in the
    # late 1980s on the calibrated demo profiles
    config = synth.demo_config(seed=1, n_states=3, households=800)
    result = synth.generate_synthetic(config)
    synth.write_synthetic(result, tmp_path / "data")
    run = pipeline.RunConfig(
        out_dir=str(tmp_path / "out"),
        microdata_path=str(tmp_path / "data" / "microdata.csv"),
        cpi_path=str(tmp_path / "data" / "cpi.csv"),
        rpp_path=str(tmp_path / "data" / "rpp.csv"),
        rent_path=str(tmp_path / "data" / "rent.csv"),
        variants=("RHH",),
        filters=("all",),
    )
    pipeline.run_pipeline(run)
    doc = json.loads((tmp_path / "out" / "keyframes_RHH_all.json").read_text())

    def rank_of(year, state):
        return next(
            s["rank"] for s in doc["years"][str(year)]["slices"] if s["state"] == state
        )

    assert rank_of(1976, "DC") < rank_of(1976, "CA")
    assert rank_of(2019, "DC") > rank_of(2019, "CA")
    crossings = [
        y for y in range(1977, 2000) if rank_of(y, "DC") > rank_of(y, "CA")
    ]
    assert crossings, "rank paths never crossed before 2000"


def test_empty_year_range_is_data_error(prepared_run):
    base, run, _written = prepared_run
    config = pipeline.RunConfig(**{
        **run.__dict__, "years": (1900, 1901), "out_dir": str(base / "out_bad"),
    })
    with pytest.raises(DataError):
        pipeline.run_pipeline(config)
