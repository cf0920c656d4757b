"""Deterministic synthetic microdata and price tables.

Stands in for licensed survey extracts in tests and demos. Incomes are
lognormal per state-year with log-linear median/scale paths; ages come
from a two-component (young/old) mixture so states can age at different
speeds; parities are generated exactly from the backcasting regression,
recursively backward from the final year, so the fit has a recoverable
ground truth. Every draw comes from a stream keyed by (seed, fips, tag),
making output a pure function of the config regardless of generation
order.

The demo configuration is calibrated so real-income benchmarks spread
like the historical record: all deeply negative mid-1970s, straddling
zero by 2019, with the small young-state slice overtaking the big one in
the late 1980s.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .model import PriceTables

# stream tags (years start at 1900, so small ints never collide)
_TAG_RENT = 1
_TAG_PARITY = 2


@dataclass(frozen=True)
class StateSynthSpec:
    code: str
    fips: int
    households: int
    weight_scale: float = 1.0
    med_real_start: float = 12000.0
    med_real_end: float = 60000.0
    sigma_start: float = 0.55
    sigma_end: float = 0.80
    young_share_start: float = 0.70
    young_share_end: float = 0.50
    black_p: float = 0.12
    hispanic_p: float = 0.15
    members_lambda: float = 1.5
    parity_end: float = 100.0
    rent_start: float = 250.0
    rent_slope: float = 20.0
    fixed_effect: float = 0.0


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    states: tuple[StateSynthSpec, ...]
    years: tuple[int, int] = (1976, 2019)
    reference_year: int = 2019
    rpp_observed_from: int = 2008
    cpi_growth: float = 0.032
    alpha: float = 9.0
    beta_rent: float = 0.0009
    beta_rent_lead: float = 0.0004
    beta_parity_lead: float = 0.90
    rpp_noise: float = 0.0
    rent_wiggle: float = 6.0
    negative_share: float = 0.01
    age_income_gamma: float = 0.0
    female_share_start: float = 0.36
    female_share_end: float = 0.50
    edu_gt12_share_start: float = 0.28
    edu_gt12_share_end: float = 0.65


@dataclass(frozen=True)
class SynthResult:
    microdata: pd.DataFrame
    price_tables: PriceTables
    truth: dict


def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def _stream(seed: int, fips: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, fips, tag)))


def _cpi_series(config: SynthConfig) -> dict[int, float]:
    y0, y1 = config.years
    years = sorted(set(range(y0, y1 + 1)) | {config.reference_year})
    return {y: float(np.exp(config.cpi_growth * (y - 1999))) for y in years}


def _rent_panel(config: SynthConfig) -> dict[tuple[int, int], float]:
    y0, y1 = config.years
    rent: dict[tuple[int, int], float] = {}
    for spec in config.states:
        rng = _stream(config.seed, spec.fips, _TAG_RENT)
        for year in range(y0, y1 + 2):  # one extra year for the lead at y1
            t = year - y0
            wiggle = config.rent_wiggle * np.sin(0.9 * t + 0.7 * spec.fips)
            wiggle += rng.uniform(-config.rent_wiggle / 2, config.rent_wiggle / 2)
            value = spec.rent_start + spec.rent_slope * t + wiggle
            rent[(spec.fips, year)] = float(max(value, 25.0))
    return rent


def _parity_panel(
    config: SynthConfig, rent: dict[tuple[int, int], float]
) -> dict[tuple[int, int], float]:
    y0, y1 = config.years
    parity: dict[tuple[int, int], float] = {}
    for spec in config.states:
        rng = _stream(config.seed, spec.fips, _TAG_PARITY)
        parity[(spec.fips, y1)] = spec.parity_end
        for year in range(y1 - 1, y0 - 1, -1):
            noise = rng.normal(0.0, config.rpp_noise) if config.rpp_noise > 0 else 0.0
            parity[(spec.fips, year)] = (
                config.alpha
                + config.beta_rent * rent[(spec.fips, year)]
                + config.beta_rent_lead * rent[(spec.fips, year + 1)]
                + config.beta_parity_lead * parity[(spec.fips, year + 1)]
                + spec.fixed_effect
                + noise
            )
    return parity


def _state_year_rows(
    config: SynthConfig, spec: StateSynthSpec, year: int, cpi_factor: float
) -> dict:
    y0, y1 = config.years
    t = (year - y0) / max(y1 - y0, 1)
    rng = _stream(config.seed, spec.fips, year)
    n = spec.households

    med_real = np.exp(_lerp(np.log(spec.med_real_start), np.log(spec.med_real_end), t))
    sigma = _lerp(spec.sigma_start, spec.sigma_end, t)
    young_share = _lerp(spec.young_share_start, spec.young_share_end, t)
    female_share = _lerp(config.female_share_start, config.female_share_end, t)
    gt12_share = _lerp(config.edu_gt12_share_start, config.edu_gt12_share_end, t)

    # nominal income: median calibrated in reference-year dollars
    income = rng.lognormal(np.log(med_real * cpi_factor), sigma, n)

    # two peaks for the young/old state contrast, plus a uniform background
    # so the far age bins stay populated even in small cells
    is_young = rng.random(n) < young_share
    age_young = rng.normal(28.0, 7.0, n)
    age_old = rng.normal(56.0, 11.0, n)
    age = np.where(is_young, age_young, age_old)
    background = rng.random(n) < 0.35
    age = np.where(background, rng.uniform(16.0, 95.0, n), age)
    age = np.clip(np.round(age), 16, 95).astype(np.int64)

    if config.age_income_gamma != 0.0:
        z = (np.clip(age, 25, 60) - 40.0) / 15.0
        income = income * np.exp(config.age_income_gamma * z)

    if config.negative_share > 0:
        neg = rng.random(n) < config.negative_share
        income = np.where(neg, -rng.lognormal(np.log(5000.0), 1.0, n), income)

    weight = rng.uniform(500.0, 2500.0, n) * spec.weight_scale
    members = np.minimum(1 + rng.poisson(spec.members_lambda, n), 12).astype(np.int64)
    female = rng.random(n) < female_share
    black = rng.random(n) < spec.black_p
    hispanic = rng.random(n) < spec.hispanic_p
    gt12 = rng.random(n) < gt12_share
    edu_le = rng.choice(np.array([8, 10, 11, 12]), size=n, p=[0.15, 0.20, 0.15, 0.50])
    edu_gt = rng.choice(np.array([13, 14, 16, 18, 20]), size=n, p=[0.20, 0.25, 0.35, 0.12, 0.08])

    return {
        "survey_year": np.full(n, year + 1, dtype=np.int64),
        "fips": np.full(n, spec.fips, dtype=np.int64),
        "state": np.full(n, spec.code),
        "income": np.round(income, 2),
        "weight": np.round(weight, 2),
        "members": members,
        "age": age,
        "sex": np.where(female, "female", "male"),
        "black": black.astype(np.int64),
        "hispanic": hispanic.astype(np.int64),
        "edu_years": np.where(gt12, edu_gt, edu_le).astype(np.int64),
    }


def generate_synthetic(config: SynthConfig) -> SynthResult:
    """Generate microdata plus price tables; a pure function of the config."""
    y0, y1 = config.years
    if y1 < y0:
        raise ValueError("years range is reversed")
    if any(spec.households < 1 for spec in config.states):
        raise ValueError("every state needs households >= 1")

    cpi = _cpi_series(config)
    cpi_ref = cpi[config.reference_year]
    rent_full = _rent_panel(config)
    parity_full = _parity_panel(config, rent_full)

    chunks = []
    for spec in sorted(config.states, key=lambda s: s.code):
        for year in range(y0, y1 + 1):
            chunks.append(_state_year_rows(config, spec, year, cpi[year] / cpi_ref))
    microdata = pd.DataFrame(
        {col: np.concatenate([c[col] for c in chunks]) for col in chunks[0]}
    )

    rent_out = {(f, y): v for (f, y), v in rent_full.items() if y0 <= y <= y1}
    rpp_observed = {
        (f, y): v for (f, y), v in parity_full.items() if y >= config.rpp_observed_from
    }
    tables = PriceTables(
        cpi=cpi,
        rpp=rpp_observed,
        rent=rent_out,
        rpp_observed_from=config.rpp_observed_from,
    )

    reference_fips = min(config.states, key=lambda s: s.code).fips
    ref_fe = {s.fips: s.fixed_effect for s in config.states}[reference_fips]
    truth = {
        "model": {
            # normalized like the fit: reference state's effect pinned to 0
            "alpha": config.alpha + ref_fe,
            "beta_rent": config.beta_rent,
            "beta_rent_lead": config.beta_rent_lead,
            "beta_parity_lead": config.beta_parity_lead,
            "fixed_effects": {
                str(s.fips): s.fixed_effect - ref_fe for s in config.states
            },
            "reference_fips": reference_fips,
        },
        "parity": {f"{f}:{y}": v for (f, y), v in sorted(parity_full.items()) if y <= y1},
        "seed": config.seed,
    }
    return SynthResult(microdata=microdata, price_tables=tables, truth=truth)


def write_synthetic(result: SynthResult, outdir: Path) -> dict[str, Path]:
    """Write the generated dataset as the pipeline's CSV input schema."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "microdata": outdir / "microdata.csv",
        "cpi": outdir / "cpi.csv",
        "rpp": outdir / "rpp.csv",
        "rent": outdir / "rent.csv",
        "truth": outdir / "synth_truth.json",
    }
    result.microdata.to_csv(paths["microdata"], index=False)
    tables = result.price_tables
    pd.DataFrame(
        {"year": sorted(tables.cpi), "cpi": [tables.cpi[y] for y in sorted(tables.cpi)]}
    ).to_csv(paths["cpi"], index=False)
    rpp_rows = sorted(tables.rpp.items())
    pd.DataFrame(
        {
            "fips": [f for (f, _y), _v in rpp_rows],
            "year": [y for (_f, y), _v in rpp_rows],
            "rpp": [v for _key, v in rpp_rows],
        }
    ).to_csv(paths["rpp"], index=False)
    rent_rows = sorted(tables.rent.items())
    pd.DataFrame(
        {
            "fips": [f for (f, _y), _v in rent_rows],
            "year": [y for (_f, y), _v in rent_rows],
            "rent": [v for _key, v in rent_rows],
        }
    ).to_csv(paths["rent"], index=False)
    paths["truth"].write_text(json.dumps(result.truth, sort_keys=True, indent=1))
    return paths


# Calibrated five-state demo: a big aging state (CA-like), a small young
# expensive one (DC-like), and three mid-size profiles. Median paths put
# every 1976 real-income benchmark deep below the 2019 reference and leave
# 2019 benchmarks straddling it.
DEMO_STATES = (
    StateSynthSpec(
        code="AL", fips=1, households=550, med_real_start=8500, med_real_end=42000,
        sigma_start=0.50, sigma_end=0.70, young_share_start=0.62, young_share_end=0.52,
        black_p=0.27, hispanic_p=0.04, members_lambda=1.5, parity_end=96.0,
        rent_start=180.0, rent_slope=12.0, fixed_effect=0.0,
    ),
    StateSynthSpec(
        code="CA", fips=6, households=1200, med_real_start=14500, med_real_end=64000,
        sigma_start=0.55, sigma_end=0.82, young_share_start=0.75, young_share_end=0.38,
        black_p=0.07, hispanic_p=0.30, members_lambda=1.9, parity_end=108.0,
        rent_start=320.0, rent_slope=30.0, fixed_effect=1.1,
    ),
    StateSynthSpec(
        code="DC", fips=11, households=500, med_real_start=13500, med_real_end=80000,
        sigma_start=0.60, sigma_end=0.95, young_share_start=0.80, young_share_end=0.74,
        black_p=0.45, hispanic_p=0.10, members_lambda=0.9, parity_end=111.0,
        rent_start=350.0, rent_slope=29.0, fixed_effect=1.4,
    ),
    StateSynthSpec(
        code="NY", fips=36, households=900, med_real_start=16000, med_real_end=62000,
        sigma_start=0.55, sigma_end=0.85, young_share_start=0.68, young_share_end=0.50,
        black_p=0.16, hispanic_p=0.18, members_lambda=1.4, parity_end=106.5,
        rent_start=300.0, rent_slope=26.0, fixed_effect=1.2,
    ),
    StateSynthSpec(
        code="TX", fips=48, households=800, med_real_start=11000, med_real_end=52000,
        sigma_start=0.55, sigma_end=0.78, young_share_start=0.72, young_share_end=0.58,
        black_p=0.12, hispanic_p=0.35, members_lambda=1.7, parity_end=99.5,
        rent_start=200.0, rent_slope=18.0, fixed_effect=0.35,
    ),
)


def demo_config(
    seed: int = 1,
    n_states: int = 5,
    years: tuple[int, int] = (1976, 2019),
    households: int | None = None,
) -> SynthConfig:
    """The stock demo: sized to run the full pipeline in well under a minute."""
    if not 1 <= n_states <= len(DEMO_STATES):
        raise ValueError(f"n_states must be in [1, {len(DEMO_STATES)}]")
    states = []
    for spec in DEMO_STATES[:n_states]:
        if households is not None:
            spec = StateSynthSpec(**{**asdict(spec), "households": households})
        states.append(spec)
    return SynthConfig(
        seed=seed, states=tuple(states), years=years, age_income_gamma=0.15
    )


def scale_config(seed: int = 1, households: int = 1257) -> SynthConfig:
    """A 51-state config matching the survey's full-period row count
    (51 x 44 x 1257 = 2,820,708 households)."""
    from .model import FIPS_TO_CODE

    base = DEMO_STATES[1]  # CA-like profile everywhere; identity varies
    states = tuple(
        StateSynthSpec(
            **{
                **asdict(base),
                "code": code,
                "fips": fips,
                "households": households,
                "fixed_effect": 0.02 * fips,
                "parity_end": 95.0 + 0.3 * (fips % 30),
            }
        )
        for fips, code in sorted(FIPS_TO_CODE.items(), key=lambda kv: kv[1])
    )
    return SynthConfig(seed=seed, states=states)
