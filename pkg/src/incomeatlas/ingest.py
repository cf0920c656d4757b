"""CSV ingestion of microdata extracts and price tables.

Column mapping is configuration, not code: extract layouts vary per data
request, so an ExtractSpec names the source column (or a constant) for
every model field. Ingestion is lossless modulo the rejection report:
input rows = accepted + rejected, with rejection counts by reason. Survey
files report incomes for the previous calendar year, so the survey year
is shifted to the income year here, once, and every downstream key uses
the income year.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .errors import DataError
from .model import DEFAULT_YEAR_RANGE, FIPS_TO_CODE, PriceTables

MODEL_FIELDS = (
    "survey_year",
    "fips",
    "state",
    "income",
    "weight",
    "members",
    "age",
    "sex",
    "black",
    "hispanic",
    "edu_years",
)

# fields that may be backfilled when the extract lacks them
_DEFAULTABLE = {"state": None}


@dataclass(frozen=True)
class ExtractSpec:
    """Where each model field comes from in the user's extract files."""

    microdata_path: Path
    cpi_path: Path
    rpp_path: Path
    rent_path: Path
    columns: dict[str, str] = field(default_factory=lambda: {f: f for f in MODEL_FIELDS})
    constants: dict[str, object] = field(default_factory=dict)
    delimiter: str = ","
    header: bool = True
    cpi_columns: tuple[str, str] = ("year", "cpi")
    rpp_columns: tuple[str, str, str] = ("fips", "year", "rpp")
    rent_columns: tuple[str, str, str] = ("fips", "year", "rent")

    def __post_init__(self):
        for name in MODEL_FIELDS:
            in_cols = name in self.columns
            in_consts = name in self.constants
            if in_cols and in_consts:
                raise DataError(f"field {name!r} maps to both a column and a constant")
            if not in_cols and not in_consts and name not in _DEFAULTABLE:
                raise DataError(f"field {name!r} has no source column or constant")

    @classmethod
    def from_json_file(cls, path: Path) -> "ExtractSpec":
        doc = json.loads(Path(path).read_text())
        base = Path(path).parent
        kwargs = {}
        for key in ("microdata_path", "cpi_path", "rpp_path", "rent_path"):
            p = Path(doc[key])
            kwargs[key] = p if p.is_absolute() else base / p
        for key in ("columns", "constants", "delimiter", "header"):
            if key in doc:
                kwargs[key] = doc[key]
        return cls(**kwargs)


def default_extract_spec(data_dir: Path) -> ExtractSpec:
    """Spec matching the synthetic generator's output schema."""
    data_dir = Path(data_dir)
    return ExtractSpec(
        microdata_path=data_dir / "microdata.csv",
        cpi_path=data_dir / "cpi.csv",
        rpp_path=data_dir / "rpp.csv",
        rent_path=data_dir / "rent.csv",
    )


@dataclass(frozen=True)
class RejectionReport:
    total_rows: int
    accepted: int
    by_reason: dict[str, int]

    @property
    def rejected(self) -> int:
        return self.total_rows - self.accepted


@dataclass(frozen=True)
class MicrodataTable:
    """Columnar microdata; every row passed validation.

    Kept as numpy columns (not per-row objects) so 10^6-row extracts stay
    cheap; rows keep file order.
    """

    year: np.ndarray
    fips: np.ndarray
    state: np.ndarray
    income: np.ndarray
    weight: np.ndarray
    members: np.ndarray
    age: np.ndarray
    sex: np.ndarray
    black: np.ndarray
    hispanic: np.ndarray
    edu_years: np.ndarray

    def __len__(self) -> int:
        return int(self.year.size)

    def states(self) -> list[int]:
        return sorted(int(f) for f in np.unique(self.fips))

    def years(self) -> list[int]:
        return sorted(int(y) for y in np.unique(self.year))


def _read_csv(path: Path, delimiter: str, header: bool) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    return pd.read_csv(path, sep=delimiter, header=0 if header else None, dtype=str)


def _source(df: pd.DataFrame, spec: ExtractSpec, name: str) -> pd.Series:
    if name in spec.constants:
        return pd.Series([spec.constants[name]] * len(df), dtype=str)
    column = spec.columns.get(name)
    if column is None:
        return pd.Series([None] * len(df))
    if column not in df.columns:
        raise DataError(f"extract is missing column {column!r} (field {name!r})")
    return df[column]


def load_microdata(
    spec: ExtractSpec,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[MicrodataTable, RejectionReport]:
    """Parse and validate the microdata extract.

    Unparseable rows and invariant violations are rejected and counted,
    never silently dropped; a missing column is a hard error. Each row's
    first failure (parse order, then invariant order) is the one counted.
    """
    df = _read_csv(spec.microdata_path, spec.delimiter, spec.header)
    n = len(df)

    numeric = {}
    parse_fail = {}
    for name in ("survey_year", "fips", "income", "weight", "members", "age", "edu_years"):
        values = pd.to_numeric(_source(df, spec, name), errors="coerce")
        numeric[name] = values.to_numpy(dtype=np.float64)
        parse_fail[name] = ~np.isfinite(numeric[name])

    sex_raw = _source(df, spec, "sex").astype(str).str.strip().str.lower()
    sex_ok = sex_raw.isin(["male", "female"]).to_numpy()
    flag_raw = {
        name: _source(df, spec, name).astype(str).str.strip().str.lower()
        for name in ("black", "hispanic")
    }
    truthy = {"1", "true", "yes"}
    falsy = {"0", "false", "no"}
    flag_ok = {
        name: raw.isin(truthy | falsy).to_numpy() for name, raw in flag_raw.items()
    }

    state_raw = _source(df, spec, "state")
    fips_int = np.where(parse_fail["fips"], -1, numeric["fips"]).astype(np.int64)
    known_fips = np.isin(fips_int, list(FIPS_TO_CODE))
    has_code = (
        state_raw.notna().to_numpy() & (state_raw.astype(str).str.len() > 0).to_numpy()
        if state_raw is not None
        else np.zeros(n, dtype=bool)
    )

    income_year = numeric["survey_year"] - 1.0

    # first failure wins; order: parse errors, then invariants as declared
    reason = np.full(n, "", dtype=object)

    def mark(mask: np.ndarray, label: str) -> None:
        mask = mask & (reason == "")
        reason[mask] = label

    for name in ("survey_year", "fips", "income", "weight", "members", "age", "edu_years"):
        mark(parse_fail[name], f"unparseable {name}")
    mark(~sex_ok, "unparseable sex")
    for name in ("black", "hispanic"):
        mark(~flag_ok[name], f"unparseable {name}")
    mark(~known_fips & ~has_code, "unknown state")
    mark(numeric["weight"] < 0, "weight >= 0")
    mark(numeric["members"] < 1, "members >= 1")
    mark((numeric["age"] < 0) | (numeric["age"] > 120), "age in [0, 120]")
    mark(
        (income_year < year_range[0]) | (income_year > year_range[1]),
        f"year in [{year_range[0]}, {year_range[1]}]",
    )

    ok = reason == ""
    by_reason = Counter(reason[~ok])
    report = RejectionReport(
        total_rows=n,
        accepted=int(np.sum(ok)),
        by_reason=dict(sorted(by_reason.items())),
    )

    from_fips = pd.Series(fips_int).map(FIPS_TO_CODE).fillna("??").to_numpy(dtype=object)
    codes = np.where(has_code, state_raw.to_numpy(dtype=object), from_fips)
    table = MicrodataTable(
        year=income_year[ok].astype(np.int64),
        fips=fips_int[ok],
        state=codes[ok].astype(str),
        income=numeric["income"][ok],
        weight=numeric["weight"][ok],
        members=numeric["members"][ok].astype(np.int64),
        age=numeric["age"][ok].astype(np.int64),
        sex=sex_raw.to_numpy()[ok].astype(str),
        black=flag_raw["black"].isin(truthy).to_numpy()[ok],
        hispanic=flag_raw["hispanic"].isin(truthy).to_numpy()[ok],
        edu_years=numeric["edu_years"][ok].astype(np.int64),
    )
    return table, report


def _read_keyed(
    path: Path, delimiter: str, columns: tuple[str, ...], value_name: str
) -> dict:
    df = _read_csv(path, delimiter, header=True)
    for column in columns:
        if column not in df.columns:
            raise DataError(f"{path} is missing column {column!r}")
    out = {}
    for _idx, row in df.iterrows():
        try:
            key_parts = [int(float(row[c])) for c in columns[:-1]]
            value = float(row[columns[-1]])
        except (TypeError, ValueError):
            raise DataError(f"{path}: unparseable row {dict(row)}") from None
        if not np.isfinite(value) or value <= 0:
            raise DataError(f"{path}: {value_name} must be positive, got {value}")
        key = key_parts[0] if len(key_parts) == 1 else tuple(key_parts)
        out[key] = value
    return out


def load_price_tables(
    spec: ExtractSpec,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> PriceTables:
    """Load CPI, parity, and rent tables.

    The CPI must cover every year in range (no CPI interpolation is
    defined anywhere); the parity panel must be observed for at least two
    consecutive years at the end of the range, and its earliest contiguous
    observed year becomes ``rpp_observed_from``.
    """
    cpi = _read_keyed(spec.cpi_path, spec.delimiter, spec.cpi_columns, "cpi")
    missing = [y for y in range(year_range[0], year_range[1] + 1) if y not in cpi]
    if missing:
        raise DataError(f"CPI series has gaps in the configured range: {missing}")

    rpp = _read_keyed(spec.rpp_path, spec.delimiter, spec.rpp_columns, "rpp")
    rent = _read_keyed(spec.rent_path, spec.delimiter, spec.rent_columns, "rent")

    rpp_years = sorted({y for (_f, y) in rpp})
    if not rpp_years:
        raise DataError("parity table is empty")
    end = year_range[1]
    if end not in rpp_years or end - 1 not in rpp_years:
        raise DataError(
            f"parity must be observed for at least two consecutive years ending {end}"
        )
    observed_from = end
    while observed_from - 1 in rpp_years:
        observed_from -= 1

    return PriceTables(cpi=cpi, rpp=rpp, rent=rent, rpp_observed_from=observed_from)
