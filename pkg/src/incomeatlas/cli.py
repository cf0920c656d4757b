"""Command-line orchestration.

Subcommands mirror the pipeline stages (synth / backcast / pipeline /
gini / serve-data) so partial reruns are cheap. Every command echoes its
resolved configuration next to its outputs, no command writes outside its
output directory, and all randomness flows from explicit seeds.

Exit codes: 0 ok, 2 usage, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import pandas as pd

from . import deflate, ingest, layout, metrics, pipeline, synth
from .errors import DataError, NumericError

ENV_DATA_DIR = "INCOMEATLAS_DATA_DIR"

EXIT_DATA = 3
EXIT_NUMERIC = 4


def _data_errors_to_exit(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DataError as exc:
            click.echo(json.dumps({"error": "data", "message": str(exc)}), err=True)
            sys.exit(EXIT_DATA)
        except NumericError as exc:
            click.echo(json.dumps({"error": "numeric", "message": str(exc)}), err=True)
            sys.exit(EXIT_NUMERIC)

    return wrapper


def _parse_years(text: str) -> tuple[int, int]:
    try:
        start, end = text.split(":")
        years = (int(start), int(end))
    except ValueError:
        raise click.UsageError(f"years must look like 1976:2019, got {text!r}")
    if years[1] < years[0]:
        raise click.UsageError("years range is reversed")
    return years


def _data_dir(value: str | None) -> Path:
    if value:
        return Path(value)
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return Path(env)
    raise click.UsageError(
        f"no data directory given and {ENV_DATA_DIR} is not set"
    )


@click.group()
def main():
    """Income-distribution keyframe pipeline."""


@main.command(name="synth")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--states", "n_states", default=5, show_default=True, type=int)
@click.option("--years", default="1976:2019", show_default=True)
@click.option("--households", default=None, type=int, help="Households per state-year.")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="Full SynthConfig as JSON (overrides the other knobs).")
@_data_errors_to_exit
def synth_cmd(out_dir, seed, n_states, years, households, config_path):
    """Generate a deterministic synthetic dataset."""
    if households is not None and households < 1:
        raise click.UsageError("--households must be >= 1")
    year_range = _parse_years(years)
    if config_path:
        doc = json.loads(Path(config_path).read_text())
        states = tuple(synth.StateSynthSpec(**s) for s in doc.pop("states"))
        config = synth.SynthConfig(states=states, **doc)
    else:
        config = synth.demo_config(
            seed=seed, n_states=n_states, years=year_range, households=households
        )
    result = synth.generate_synthetic(config)
    outdir = Path(out_dir)
    paths = synth.write_synthetic(result, outdir)
    echo = {
        "command": "synth",
        "seed": config.seed,
        "years": list(config.years),
        "states": [s.code for s in config.states],
        "households": [s.households for s in config.states],
        "outputs": {k: str(p.name) for k, p in paths.items()},
    }
    (outdir / "run_config.json").write_text(json.dumps(echo, sort_keys=True, indent=1) + "\n")
    click.echo(f"wrote {len(result.microdata)} households to {outdir}")


def _input_options(fn):
    fn = click.option("--data-dir", default=None, type=click.Path(),
                      help=f"Directory with microdata/cpi/rpp/rent CSVs (or ${ENV_DATA_DIR}).")(fn)
    fn = click.option("--microdata", default=None, type=click.Path())(fn)
    fn = click.option("--cpi", default=None, type=click.Path())(fn)
    fn = click.option("--rpp", default=None, type=click.Path())(fn)
    fn = click.option("--rent", default=None, type=click.Path())(fn)
    fn = click.option("--extract-spec", "extract_spec", default=None, type=click.Path(),
                      help="JSON column-mapping spec for non-default extracts.")(fn)
    return fn


def _resolve_inputs(data_dir, microdata, cpi, rpp, rent, extract_spec):
    if extract_spec:
        return {"extract_spec_path": str(extract_spec)}
    if not all([microdata, cpi, rpp, rent]):
        base = _data_dir(data_dir)
        microdata = microdata or base / "microdata.csv"
        cpi = cpi or base / "cpi.csv"
        rpp = rpp or base / "rpp.csv"
        rent = rent or base / "rent.csv"
    return {
        "microdata_path": str(microdata),
        "cpi_path": str(cpi),
        "rpp_path": str(rpp),
        "rent_path": str(rent),
    }


@main.command()
@_input_options
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--years", default="1976:2019", show_default=True)
@click.option("--reference-year", default=2019, show_default=True, type=int)
@click.option("--no-backcast", is_flag=True, help="Keep the parity panel observed-only.")
@_data_errors_to_exit
def backcast(data_dir, microdata, cpi, rpp, rent, extract_spec, out_dir, years,
             reference_year, no_backcast):
    """Fit the parity regression and write the deflator document."""
    year_range = _parse_years(years)
    inputs = _resolve_inputs(data_dir, microdata, cpi, rpp, rent, extract_spec)
    config = pipeline.RunConfig(
        out_dir=str(out_dir), years=year_range, reference_year=reference_year,
        backcast=not no_backcast, **inputs,
    )
    spec = pipeline._extract_spec(config)
    tables = ingest.load_price_tables(spec, year_range)
    deflators = deflate.build_deflators(
        tables, range(year_range[0], year_range[1] + 1),
        reference_year=reference_year, backcast=not no_backcast,
    )
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "deflators.json").write_text(deflators.to_json())
    config.echo(outdir)
    if deflators.model is not None:
        model = deflators.model
        report = model.to_dict()
        (outdir / "backcast_report.json").write_text(
            json.dumps(report, sort_keys=True, indent=1) + "\n"
        )
        click.echo(
            f"fit: n={model.n_obs} R^2={model.r_squared:.6f} "
            f"residual_sd={model.residual_sd:.6g}"
        )
        click.echo(f"{'state':<8}{'fixed effect':>14}")
        code_of = {f: layout.FIPS_TO_CODE.get(f, str(f)) for f in model.fixed_effects}
        for fips, fe in sorted(model.fixed_effects.items(), key=lambda kv: -kv[1]):
            click.echo(f"{code_of[fips]:<8}{fe:>14.6f}")
    else:
        click.echo("backcasting disabled; deflators restricted to observed parity years")
    click.echo(f"wrote {outdir / 'deflators.json'}")


@main.command(name="pipeline")
@_input_options
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--deflators", "deflators_path", default=None, type=click.Path(exists=True),
              help="Reuse a deflator document from `backcast`.")
@click.option("--years", default="1976:2019", show_default=True)
@click.option("--reference-year", default=2019, show_default=True, type=int)
@click.option("--variant", "variants", multiple=True,
              type=click.Choice(list(pipeline.ALL_VARIANTS)), help="Default: all four.")
@click.option("--filter", "filters", multiple=True,
              type=click.Choice(list(pipeline.ALL_FILTERS)), help="Default: all nine.")
@click.option("--scheme", default="decile", show_default=True,
              type=click.Choice(["decile", "percentile"]))
@click.option("--age-mode", default="reweight", show_default=True,
              type=click.Choice(["reweight", "resample", "none"]))
@click.option("--age-seed", default=None, type=int)
@click.option("--bootstrap-b", default=None, type=int, help="Bootstrap replicates (off by default).")
@click.option("--bootstrap-seed", default=None, type=int)
@click.option("--no-backcast", is_flag=True)
@click.option("--jobs", default=1, show_default=True, type=int)
@click.option("--gzip", "gz", is_flag=True, help="Write .json.gz bundles.")
@click.option("--sidecar", is_flag=True,
              help="Also write full-precision bundle copies under sidecar/.")
@_data_errors_to_exit
def pipeline_cmd(data_dir, microdata, cpi, rpp, rent, extract_spec, out_dir,
                 deflators_path, years, reference_year, variants, filters, scheme,
                 age_mode, age_seed, bootstrap_b, bootstrap_seed, no_backcast, jobs,
                 gz, sidecar):
    """Run the full pipeline and write keyframe bundles + manifest."""
    if age_mode == "resample" and age_seed is None:
        raise click.UsageError("--age-mode resample requires --age-seed")
    if bootstrap_b is not None and bootstrap_b < 2:
        raise click.UsageError("--bootstrap-b must be >= 2")
    if bootstrap_b is not None and bootstrap_seed is None:
        raise click.UsageError("--bootstrap-b requires --bootstrap-seed")
    if jobs < 1:
        raise click.UsageError("--jobs must be >= 1")
    inputs = _resolve_inputs(data_dir, microdata, cpi, rpp, rent, extract_spec)
    config = pipeline.RunConfig(
        out_dir=str(out_dir),
        deflators_path=str(deflators_path) if deflators_path else None,
        years=_parse_years(years),
        reference_year=reference_year,
        variants=tuple(variants) or pipeline.ALL_VARIANTS,
        filters=tuple(filters) or pipeline.ALL_FILTERS,
        scheme=scheme,
        age_mode=age_mode,
        age_seed=age_seed,
        bootstrap_b=bootstrap_b,
        bootstrap_seed=bootstrap_seed,
        backcast=not no_backcast,
        jobs=jobs,
        gzip=gz,
        sidecar=sidecar,
        **inputs,
    )
    written = pipeline.run_pipeline(config)
    click.echo(f"wrote {len(written)} bundle(s) to {config.out_dir}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="CSV with per-row incomes (microdata or a downloaded keyframe CSV).")
@click.option("--income-col", default="income", show_default=True)
@click.option("--weight-col", default=None, help="Optional weight column.")
@click.option("--state-col", default="state", show_default=True)
@click.option("--year-col", default="year", show_default=True)
@click.option("--method", default="sorted", show_default=True,
              type=click.Choice(["naive", "sorted"]))
@click.option("--allow-negative", is_flag=True,
              help="Permit negative incomes (coefficient may exceed 1).")
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Also write gini.csv into this directory.")
@_data_errors_to_exit
def gini(input_path, income_col, weight_col, state_col, year_col, method,
         allow_negative, out_dir):
    """Gini coefficient per (state, year) group of a CSV."""
    df = pd.read_csv(input_path)
    for column in (income_col, state_col, year_col):
        if column not in df.columns:
            raise DataError(f"{input_path} is missing column {column!r}")
    if weight_col and weight_col not in df.columns:
        raise DataError(f"{input_path} is missing column {weight_col!r}")
    values = pd.to_numeric(df[income_col], errors="coerce")
    dropped = int(values.isna().sum())
    df = df.assign(__income=values).dropna(subset=["__income"])

    fn = metrics.gini_naive if method == "naive" else metrics.gini_sorted
    rows = []
    try:
        for (state, year), group in df.groupby([state_col, year_col], sort=True):
            weights = (
                pd.to_numeric(group[weight_col], errors="coerce").to_numpy()
                if weight_col
                else None
            )
            result = fn(group["__income"].to_numpy(), weights, allow_negative=allow_negative)
            rows.append({"state": state, "year": year, "g": result.g, "n": result.n})
    except ValueError as exc:
        raise DataError(str(exc)) from None
    click.echo(f"{'state':<8}{'year':>6}{'gini':>12}{'n':>8}")
    for row in rows:
        click.echo(f"{row['state']:<8}{row['year']:>6}{row['g']:>12.6f}{row['n']:>8}")
    if dropped:
        click.echo(f"(dropped {dropped} rows with missing income)", err=True)
    if out_dir:
        outdir = Path(out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows).to_csv(outdir / "gini.csv", index=False)
        (outdir / "run_config.json").write_text(
            json.dumps(
                {"command": "gini", "input": str(input_path), "method": method,
                 "income_col": income_col, "weight_col": weight_col},
                sort_keys=True, indent=1,
            ) + "\n"
        )


@main.command(name="serve-data")
@click.option("--dir", "directory", required=True, type=click.Path(exists=True))
@click.option("--port", default=8765, show_default=True, type=int)
def serve_data(directory, port):
    """Statically host bundle files for the explorer during development."""
    import http.server

    directory = str(Path(directory).resolve())

    class Handler(http.server.SimpleHTTPRequestHandler):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, directory=directory, **kwargs)

        def end_headers(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            super().end_headers()

    with http.server.ThreadingHTTPServer(("127.0.0.1", port), Handler) as httpd:
        click.echo(f"serving {directory} at http://127.0.0.1:{port}/ (Ctrl+C to stop)")
        httpd.serve_forever()


if __name__ == "__main__":
    main()
