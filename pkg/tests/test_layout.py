import json
from pathlib import Path

import numpy as np
import pytest

from incomeatlas import layout, pipeline, segment
from incomeatlas.errors import DataError
from incomeatlas.metrics import BootstrapReport, BucketSE

GOLDEN = Path(__file__).parent / "golden" / "assemble_golden.json"


def test_positions_self_difference_zero():
    out = layout.benchmark_positions({(6, 2019): 50000.0}, 50000.0)
    assert out[(6, 2019)] == 0.0


def test_positions_known_subtraction():
    out = layout.benchmark_positions({(6, 1976): 30000.0}, 50000.0)
    assert out[(6, 1976)] == -20000.0


def test_positions_differences_translation_invariant():
    medians = {(1, 2000): 30000.0, (6, 2000): 45000.0}
    a = layout.benchmark_positions(medians, 40000.0)
    shifted = {k: v + 12345.0 for k, v in medians.items()}
    b = layout.benchmark_positions(shifted, 40000.0 + 12345.0)
    assert a[(6, 2000)] - a[(1, 2000)] == b[(6, 2000)] - b[(1, 2000)]


def test_rank_states_simple():
    medians = {(1, 2000): 10.0, (6, 2000): 20.0, (11, 2000): 30.0}
    assert layout.rank_states(medians, 2000) == {1: 1, 6: 2, 11: 3}


def test_rank_states_ties_share_and_skip():
    medians = {(1, 2000): 10.0, (6, 2000): 10.0, (11, 2000): 30.0}
    assert layout.rank_states(medians, 2000) == {1: 1, 6: 1, 11: 3}


def test_thickness_by_hand():
    assert layout.thickness({1: 100.0, 6: 300.0}) == {1: 1.0, 6: 3.0}


def test_thickness_single_state():
    assert layout.thickness({11: 42.0}) == {11: 1.0}


def test_thickness_min_is_exactly_one(rng):
    totals = {int(f): float(v) for f, v in enumerate(rng.uniform(10, 1e6, 20), start=1)}
    out = layout.thickness(totals)
    assert min(out.values()) == 1.0


def test_thickness_zero_population_is_error():
    with pytest.raises(DataError):
        layout.thickness({1: 0.0, 6: 10.0})


def test_round_sig():
    assert layout.round_sig(123456.789) == 123457.0
    assert layout.round_sig(-0.000123456789) == -0.000123457
    assert layout.round_sig(0.0) == 0.0


def fixture_inputs(with_bootstrap=False):
    def mk_buckets(values):
        ranked = segment.percentile_ranks(np.asarray(values, dtype=float),
                                          np.ones(len(values)))
        return segment.build_buckets(segment.trim(ranked).frame, "decile")

    grid = {
        (6, 2018): mk_buckets(np.arange(1.0, 101.0) * 1000.0),
        (6, 2019): mk_buckets(np.arange(1.0, 101.0) * 1100.0),
        (36, 2018): mk_buckets(np.arange(1.0, 101.0) * 900.0),
        (36, 2019): mk_buckets(np.arange(1.0, 101.0) * 950.0),
    }
    medians = {(6, 2018): 50000.0, (6, 2019): 55000.0,
               (36, 2018): 45000.0, (36, 2019): 47500.0}
    positions = layout.benchmark_positions(medians, 51000.0)
    ranks = {y: layout.rank_states(medians, y) for y in (2018, 2019)}
    thick = {
        2018: layout.thickness({6: 300.0, 36: 100.0}),
        2019: layout.thickness({6: 330.0, 36: 100.0}),
    }
    counts = {key: 91 for key in grid}
    metadata = {
        "reference_year": 2019,
        "reference_median": 51000.0,
        "age_mode": "reweight",
        "age_seed": None,
        "bootstrap": {"B": 10, "seed": 5} if with_bootstrap else None,
        "deflators": {"rpp_observed_from": 2008, "backcast": True},
        "states": [{"fips": 6, "state": "CA"}, {"fips": 36, "state": "NY"}],
    }
    bootstrap = None
    if with_bootstrap:
        bootstrap = {
            key: BootstrapReport(
                replicates=10, seed=5, scheme="decile",
                buckets=[BucketSE(k=k, estimate=1.0, se=123.456 + k) for k in segment.DECILE_KS],
            )
            for key in grid
        }
    return dict(
        variant="RHH", filter_name="all", scheme="decile", buckets=grid,
        positions=positions, ranks=ranks, thickness_by_year=thick, counts=counts,
        metadata=metadata, bootstrap=bootstrap, rpp_backcast_years=set(),
    )


def test_assemble_is_deterministic():
    a = layout.serialize_bundle(layout.assemble(**fixture_inputs()))
    b = layout.serialize_bundle(layout.assemble(**fixture_inputs()))
    assert a == b


def test_assemble_golden_bytes():
    payload = layout.serialize_bundle(layout.assemble(**fixture_inputs()))
    assert payload == GOLDEN.read_bytes()


def test_assemble_validates_against_schema():
    doc = layout.bundle_to_doc(layout.assemble(**fixture_inputs()))
    pipeline.validate_bundle_doc(doc)


def test_assemble_without_bootstrap_has_no_se_fields():
    doc = layout.bundle_to_doc(layout.assemble(**fixture_inputs(with_bootstrap=False)))
    pipeline.validate_bundle_doc(doc)
    for frame in doc["years"].values():
        for s in frame["slices"]:
            assert all("se" not in b for b in s["buckets"])


def test_assemble_with_bootstrap_attaches_se():
    doc = layout.bundle_to_doc(layout.assemble(**fixture_inputs(with_bootstrap=True)))
    pipeline.validate_bundle_doc(doc)
    bucket = doc["years"]["2019"]["slices"][0]["buckets"][1]
    assert bucket["se"] == layout.round_sig(123.456 + bucket["k"])


def test_assemble_grid_mismatch_is_error():
    inputs = fixture_inputs()
    del inputs["positions"][(36, 2019)]
    with pytest.raises(DataError, match="positions missing"):
        layout.assemble(**inputs)


def test_assemble_requires_identical_state_sets():
    inputs = fixture_inputs()
    inputs["buckets"] = {k: v for k, v in inputs["buckets"].items() if k != (36, 2019)}
    with pytest.raises(DataError, match="identical state set"):
        layout.assemble(**inputs)


def test_slices_sorted_by_benchmark():
    doc = layout.bundle_to_doc(layout.assemble(**fixture_inputs()))
    for frame in doc["years"].values():
        marks = [s["benchmark"] for s in frame["slices"]]
        assert marks == sorted(marks)
