"""Price-side adjustments.

Rebases the CPI factor to the reference year, densifies the gross-rent
panel by linear interpolation, backcasts pre-2008 regional price parities
from a fixed-effects regression on rent and next-year values, and divides
household income by the active normalizer product.

The parity regression: parity = alpha + b_rent * rent + b_rent_lead *
lead(rent) + b_parity_lead * lead(parity) + state fixed effect + noise,
with lead(.) the next calendar year. Backcasting runs the fitted relation
recursively backward from the earliest observed year, so each predicted
year feeds the one before it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DataError, NumericError
from .model import FIPS_TO_CODE, Variant, VARIANT_NORMALIZERS

DEFLATORS_SCHEMA_VERSION = "1.0.0"


def rebase_cpi(cpi: dict[int, float], reference_year: int = 2019) -> dict[int, float]:
    """Rebase a CPI factor series so the reference year is exactly 1.

    The input series is treated as an opaque positive factor; only the
    ratio to the reference year matters.
    """
    if reference_year not in cpi:
        raise DataError(f"CPI series does not cover the reference year {reference_year}")
    ref = cpi[reference_year]
    return {year: value / ref for year, value in cpi.items()}


def interpolate_rent(
    rent: dict[tuple[int, int], float],
    years: Iterable[int],
) -> dict[tuple[int, int], float]:
    """Fill a sparse (fips, year) rent panel over ``years``.

    Linear between observed years, flat (nearest observed) outside the
    observed span; observed cells pass through unchanged.
    """
    years = sorted(years)
    by_state: dict[int, list[tuple[int, float]]] = {}
    for (fips, year), value in rent.items():
        by_state.setdefault(fips, []).append((year, value))
    dense: dict[tuple[int, int], float] = {}
    for fips, obs in sorted(by_state.items()):
        obs.sort()
        if len(obs) < 2:
            raise DataError(
                f"rent for state fips={fips} has {len(obs)} observed year(s); need >= 2"
            )
        xs = np.array([y for y, _ in obs], dtype=np.float64)
        ys = np.array([v for _, v in obs], dtype=np.float64)
        observed = dict(obs)
        filled = np.interp(np.array(years, dtype=np.float64), xs, ys)
        for year, value in zip(years, filled):
            # exact pass-through for observed cells
            dense[(fips, year)] = observed.get(year, float(value))
    return dense


@dataclass(frozen=True)
class BackcastModel:
    """Fitted parity regression with per-state fixed effects.

    The reference state's fixed effect is pinned to 0 (absorbed into the
    intercept); it is the alphabetically first state code.
    """

    alpha: float
    beta_rent: float
    beta_rent_lead: float
    beta_parity_lead: float
    fixed_effects: dict[int, float]
    reference_fips: int
    r_squared: float
    residual_sd: float
    n_obs: int

    def predict(self, fips: int, rent_t: float, rent_lead: float, parity_lead: float) -> float:
        return (
            self.alpha
            + self.beta_rent * rent_t
            + self.beta_rent_lead * rent_lead
            + self.beta_parity_lead * parity_lead
            + self.fixed_effects[fips]
        )

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta_rent": self.beta_rent,
            "beta_rent_lead": self.beta_rent_lead,
            "beta_parity_lead": self.beta_parity_lead,
            "fixed_effects": {str(f): v for f, v in sorted(self.fixed_effects.items())},
            "reference_fips": self.reference_fips,
            "r_squared": self.r_squared,
            "residual_sd": self.residual_sd,
            "n_obs": self.n_obs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BackcastModel":
        return cls(
            alpha=d["alpha"],
            beta_rent=d["beta_rent"],
            beta_rent_lead=d["beta_rent_lead"],
            beta_parity_lead=d["beta_parity_lead"],
            fixed_effects={int(f): v for f, v in d["fixed_effects"].items()},
            reference_fips=d["reference_fips"],
            r_squared=d["r_squared"],
            residual_sd=d["residual_sd"],
            n_obs=d["n_obs"],
        )


def fit_backcast(
    panel: list[tuple[int, int, float, float, float, float]],
    fips_to_code: dict[int, str],
) -> BackcastModel:
    """OLS fit of the parity regression on (fips, year, rent, lead rent,
    parity, lead parity) rows.

    Solved by SVD-backed least squares (dummy-heavy design matrices are too
    ill-conditioned for the raw normal equations), with an explicit rank
    check that names collinear columns.
    """
    if not panel:
        raise DataError("empty estimation panel")
    states = sorted({row[0] for row in panel}, key=lambda f: fips_to_code.get(f, str(f)))
    reference = states[0]
    dummy_states = states[1:]
    col_names = ["intercept", "rent", "rent_lead", "parity_lead"] + [
        f"fe_{fips_to_code.get(f, f)}" for f in dummy_states
    ]
    n = len(panel)
    p = 4 + len(dummy_states)
    if n < p:
        raise DataError(f"estimation panel has {n} rows for {p} coefficients")
    X = np.zeros((n, p))
    y = np.zeros(n)
    dummy_index = {f: i for i, f in enumerate(dummy_states)}
    for i, (fips, _year, rent_t, rent_lead, parity, parity_lead) in enumerate(panel):
        X[i, 0] = 1.0
        X[i, 1] = rent_t
        X[i, 2] = rent_lead
        X[i, 3] = parity_lead
        if fips in dummy_index:
            X[i, 4 + dummy_index[fips]] = 1.0
        y[i] = parity

    coef, _res, rank, sv = np.linalg.lstsq(X, y, rcond=None)
    if rank < p:
        raise NumericError(
            "rank-deficient design matrix; collinear columns: "
            + ", ".join(_collinear_columns(X, col_names))
        )

    fitted = X @ coef
    resid = y - fitted
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ssr / sst if sst > 0 else 1.0
    dof = n - p
    residual_sd = float(np.sqrt(ssr / dof)) if dof > 0 else 0.0

    fe = {reference: 0.0}
    for f, i in dummy_index.items():
        fe[f] = float(coef[4 + i])
    return BackcastModel(
        alpha=float(coef[0]),
        beta_rent=float(coef[1]),
        beta_rent_lead=float(coef[2]),
        beta_parity_lead=float(coef[3]),
        fixed_effects=fe,
        reference_fips=reference,
        r_squared=r_squared,
        residual_sd=residual_sd,
        n_obs=n,
    )


def _collinear_columns(X: np.ndarray, names: list[str]) -> list[str]:
    # columns loading on near-null singular vectors
    _u, s, vt = np.linalg.svd(X, full_matrices=False)
    tol = s.max() * max(X.shape) * np.finfo(float).eps
    flagged: list[str] = []
    for row in vt[s < tol]:
        for j in np.flatnonzero(np.abs(row) > 0.1):
            if names[j] not in flagged:
                flagged.append(names[j])
    return flagged or ["<undetermined>"]


def build_estimation_panel(
    rpp_observed: dict[tuple[int, int], float],
    rent_dense: dict[tuple[int, int], float],
) -> list[tuple[int, int, float, float, float, float]]:
    """Rows (fips, year, rent, lead rent, parity, lead parity) for every
    year where both the parity and its lead are observed."""
    panel = []
    for (fips, year), parity in sorted(rpp_observed.items()):
        lead = rpp_observed.get((fips, year + 1))
        if lead is None:
            continue
        rent_t = rent_dense.get((fips, year))
        rent_lead = rent_dense.get((fips, year + 1))
        if rent_t is None or rent_lead is None:
            raise DataError(f"rent panel missing fips={fips}, year={year} or lead")
        panel.append((fips, year, rent_t, rent_lead, parity, lead))
    return panel


def backcast_rpp(
    model: BackcastModel,
    rent_dense: dict[tuple[int, int], float],
    rpp_observed: dict[tuple[int, int], float],
    years: Iterable[int],
) -> tuple[dict[tuple[int, int], float], dict[tuple[int, int], bool]]:
    """Extend the observed parity panel back to the start of ``years``.

    Runs the fitted relation year by year backward; the lead parity is the
    observed value when available, else the previously backcast one.
    Observed cells are never overwritten. Returns (panel, observed_flags).
    """
    years = sorted(years)
    states = sorted({f for f, _ in rpp_observed})
    full: dict[tuple[int, int], float] = dict(rpp_observed)
    flags: dict[tuple[int, int], bool] = {key: True for key in rpp_observed}
    for fips in states:
        observed_years = [y for f, y in rpp_observed if f == fips]
        first_observed = min(observed_years)
        for year in range(first_observed - 1, years[0] - 1, -1):
            rent_t = rent_dense.get((fips, year))
            rent_lead = rent_dense.get((fips, year + 1))
            if rent_t is None or rent_lead is None:
                raise DataError(f"rent panel missing fips={fips} around year {year}")
            parity_lead = full[(fips, year + 1)]
            full[(fips, year)] = model.predict(fips, rent_t, rent_lead, parity_lead)
            flags[(fips, year)] = False
    return full, flags


def effective_size(members: int) -> float:
    """Square-root equivalence scale for a household of ``members`` people."""
    if members < 1:
        raise ValueError("members must be >= 1")
    return float(np.sqrt(members))


@dataclass(frozen=True)
class DeflatorSet:
    """Everything needed to adjust one household's income.

    ``cpi_factor`` is rebased so the reference year is 1; ``rpp_full``
    covers every (fips, year) in range, each cell flagged observed or
    backcast; ``rent_dense`` is the interpolated monthly rent panel.
    """

    reference_year: int
    years: tuple[int, ...]
    cpi_factor: dict[int, float]
    rpp_full: dict[tuple[int, int], float]
    rpp_observed_flag: dict[tuple[int, int], bool]
    rent_dense: dict[tuple[int, int], float]
    rpp_observed_from: int
    model: Optional[BackcastModel] = None

    def __post_init__(self):
        for year in self.years:
            if year not in self.cpi_factor:
                raise DataError(f"CPI factor missing year {year}")
        for key in self.rpp_full:
            if key not in self.rpp_observed_flag:
                raise DataError(f"parity cell {key} has no observed/backcast flag")

    def states(self) -> list[int]:
        return sorted({f for f, _ in self.rpp_full})

    def year_has_backcast(self, year: int) -> bool:
        return any(
            not self.rpp_observed_flag[(f, y)] for (f, y) in self.rpp_full if y == year
        )

    def to_json(self) -> str:
        doc = {
            "schema_version": DEFLATORS_SCHEMA_VERSION,
            "kind": "deflators",
            "reference_year": self.reference_year,
            "years": list(self.years),
            "cpi_factor": {str(y): v for y, v in sorted(self.cpi_factor.items())},
            "rpp_observed_from": self.rpp_observed_from,
            "model": self.model.to_dict() if self.model else None,
            "parity": {
                f"{fips}:{year}": {
                    "value": value,
                    "observed": self.rpp_observed_flag[(fips, year)],
                }
                for (fips, year), value in sorted(self.rpp_full.items())
            },
            "rent": {
                f"{fips}:{year}": value
                for (fips, year), value in sorted(self.rent_dense.items())
            },
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DeflatorSet":
        doc = json.loads(text)
        if doc.get("kind") != "deflators":
            raise DataError("not a deflators document")
        major = str(doc.get("schema_version", "")).split(".")[0]
        if major != DEFLATORS_SCHEMA_VERSION.split(".")[0]:
            raise DataError(f"unsupported deflators schema version {doc.get('schema_version')}")

        def unkey(s: str) -> tuple[int, int]:
            f, y = s.split(":")
            return int(f), int(y)

        parity = {unkey(k): v["value"] for k, v in doc["parity"].items()}
        flags = {unkey(k): v["observed"] for k, v in doc["parity"].items()}
        return cls(
            reference_year=doc["reference_year"],
            years=tuple(doc["years"]),
            cpi_factor={int(y): v for y, v in doc["cpi_factor"].items()},
            rpp_full=parity,
            rpp_observed_flag=flags,
            rent_dense={unkey(k): v for k, v in doc["rent"].items()},
            rpp_observed_from=doc["rpp_observed_from"],
            model=BackcastModel.from_dict(doc["model"]) if doc.get("model") else None,
        )


def build_deflators(
    price_tables,
    years: Iterable[int],
    reference_year: int = 2019,
    backcast: bool = True,
) -> DeflatorSet:
    """Assemble the full deflator set from raw price tables.

    With ``backcast=False`` the parity panel stays observed-only and the
    regional-price variants are limited to the observed years.
    """
    years = tuple(sorted(years))
    cpi_factor = rebase_cpi(price_tables.cpi, reference_year)
    for year in years:
        if year not in cpi_factor:
            raise DataError(f"CPI series missing year {year}")
    # the estimation panel needs rent over the observed-parity window even
    # when the display range is narrower
    rpp_years = {y for (_f, y) in price_tables.rpp}
    rent_span = range(
        min([years[0], *rpp_years]), max([years[-1], *rpp_years]) + 1
    )
    rent_dense = interpolate_rent(price_tables.rent, rent_span)
    model = None
    if backcast:
        panel = build_estimation_panel(price_tables.rpp, rent_dense)
        model = fit_backcast(panel, FIPS_TO_CODE)
        rpp_full, flags = backcast_rpp(model, rent_dense, price_tables.rpp, years)
    else:
        rpp_full = dict(price_tables.rpp)
        flags = {key: True for key in rpp_full}
    return DeflatorSet(
        reference_year=reference_year,
        years=years,
        cpi_factor=cpi_factor,
        rpp_full=rpp_full,
        rpp_observed_flag=flags,
        rent_dense=rent_dense,
        rpp_observed_from=price_tables.rpp_observed_from,
        model=model,
    )


def normalizer_product(
    deflators: DeflatorSet,
    variant: Variant,
    fips: int,
    year: int,
    members: int,
) -> float:
    """Product of the variant's active normalizers for one household.

    The parity enters divided by 100 so the national level is a neutral 1.
    """
    active = VARIANT_NORMALIZERS[variant]
    prod = 1.0
    if "C" in active:
        try:
            prod *= deflators.cpi_factor[year]
        except KeyError:
            raise DataError(f"CPI factor missing year {year}") from None
    if "R" in active:
        try:
            prod *= deflators.rpp_full[(fips, year)] / 100.0
        except KeyError:
            raise DataError(f"parity missing fips={fips}, year={year}") from None
    if "S" in active:
        prod *= effective_size(members)
    return prod


def adjust_income(
    income: float,
    deflators: DeflatorSet,
    variant: Variant,
    fips: int,
    year: int,
    members: int,
) -> float:
    """Adjusted income: nominal income over the active normalizer product."""
    return income / normalizer_product(deflators, variant, fips, year, members)
