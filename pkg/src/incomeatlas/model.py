"""Domain types and validation shared by the whole pipeline.

All types are immutable after construction and safe to share across
concurrent tasks. State identity is FIPS-keyed internally; the 2-letter
code is presentation only. The ``year`` on a household is the income year
(survey year minus one), applied at ingestion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

DEFAULT_YEAR_RANGE = (1976, 2019)

# FIPS -> postal code for the 50 states + DC.
FIPS_TO_CODE = {
    1: "AL", 2: "AK", 4: "AZ", 5: "AR", 6: "CA", 8: "CO", 9: "CT", 10: "DE",
    11: "DC", 12: "FL", 13: "GA", 15: "HI", 16: "ID", 17: "IL", 18: "IN",
    19: "IA", 20: "KS", 21: "KY", 22: "LA", 23: "ME", 24: "MD", 25: "MA",
    26: "MI", 27: "MN", 28: "MS", 29: "MO", 30: "MT", 31: "NE", 32: "NV",
    33: "NH", 34: "NJ", 35: "NM", 36: "NY", 37: "NC", 38: "ND", 39: "OH",
    40: "OK", 41: "OR", 42: "PA", 44: "RI", 45: "SC", 46: "SD", 47: "TN",
    48: "TX", 49: "UT", 50: "VT", 51: "VA", 53: "WA", 54: "WV", 55: "WI",
    56: "WY",
}
CODE_TO_FIPS = {code: fips for fips, code in FIPS_TO_CODE.items()}


class Variant(enum.Enum):
    """Which normalizers divide household income.

    RHH = inflation only; ERHH adds household size; RHHRPP adds regional
    prices; ERHHRPP divides by all three.
    """

    RHH = "RHH"
    ERHH = "ERHH"
    RHHRPP = "RHHRPP"
    ERHHRPP = "ERHHRPP"


# Normalizer sets per variant: C = inflation factor, R = regional parity,
# S = equivalence scale.
VARIANT_NORMALIZERS = {
    Variant.RHH: frozenset({"C"}),
    Variant.ERHH: frozenset({"C", "S"}),
    Variant.RHHRPP: frozenset({"C", "R"}),
    Variant.ERHHRPP: frozenset({"C", "R", "S"}),
}


@dataclass(frozen=True)
class HouseholdRecord:
    """One survey household, keyed by income year."""

    year: int
    fips: int
    state: str
    income: float
    weight: float
    members: int
    age: int
    sex: str  # "male" | "female" (householder)
    black: bool
    hispanic: bool
    edu_years: int


def validate(
    record: HouseholdRecord,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> Optional[str]:
    """Return the first violated invariant, or None if the record is valid.

    Total function: never raises. Negative incomes are permitted (removed
    later by the bottom-percentile trim, never at ingestion).
    """
    if record.weight < 0:
        return "weight >= 0"
    if record.members < 1:
        return "members >= 1"
    if not 0 <= record.age <= 120:
        return "age in [0, 120]"
    if not year_range[0] <= record.year <= year_range[1]:
        return f"year in [{year_range[0]}, {year_range[1]}]"
    return None


@dataclass(frozen=True)
class PriceTables:
    """CPI series, observed regional price parities, and gross rents.

    ``cpi``: year -> index value (any positive base; rebased downstream).
    ``rpp``: (fips, year) -> parity in percent of the national level.
    ``rent``: (fips, year) -> monthly dollars; may be sparse in years.
    """

    cpi: dict[int, float]
    rpp: dict[tuple[int, int], float]
    rent: dict[tuple[int, int], float]
    rpp_observed_from: int = 2008

    def __post_init__(self):
        for year, value in self.cpi.items():
            if value <= 0:
                raise ValueError(f"cpi[{year}] must be > 0, got {value}")
        for key, value in self.rpp.items():
            if value <= 0:
                raise ValueError(f"rpp[{key}] must be > 0, got {value}")
        for key, value in self.rent.items():
            if value <= 0:
                raise ValueError(f"rent[{key}] must be > 0, got {value}")


@dataclass(frozen=True)
class SubpopulationFilter:
    """Household filter; a household matches iff all set fields match.

    ``edu_band``: "le12" (high school or below) or "gt12" (beyond high
    school). The empty filter matches every household.
    """

    sex: Optional[str] = None
    black: Optional[bool] = None
    hispanic: Optional[bool] = None
    edu_band: Optional[str] = None
    name: str = field(default="all", compare=False)

    def matches(self, record: HouseholdRecord) -> bool:
        if self.sex is not None and record.sex != self.sex:
            return False
        if self.black is not None and record.black != self.black:
            return False
        if self.hispanic is not None and record.hispanic != self.hispanic:
            return False
        if self.edu_band == "le12" and record.edu_years > 12:
            return False
        if self.edu_band == "gt12" and record.edu_years <= 12:
            return False
        return True


# The nine canonical filters rendered by the explorer.
STANDARD_FILTERS = {
    "all": SubpopulationFilter(),
    "male": SubpopulationFilter(sex="male", name="male"),
    "female": SubpopulationFilter(sex="female", name="female"),
    "black": SubpopulationFilter(black=True, name="black"),
    "nonblack": SubpopulationFilter(black=False, name="nonblack"),
    "hispanic": SubpopulationFilter(hispanic=True, name="hispanic"),
    "nonhispanic": SubpopulationFilter(hispanic=False, name="nonhispanic"),
    "edu_le12": SubpopulationFilter(edu_band="le12", name="edu_le12"),
    "edu_gt12": SubpopulationFilter(edu_band="gt12", name="edu_gt12"),
}
