"""Command-line front end.

Subcommands: ``sweep`` (analytic grid, optional MC columns per config),
``validate`` (sweep with the Monte-Carlo oracle forced on), ``range``
(IRS coverage range table), ``hardening`` (kappa vs element count),
``crossover`` (mode-curve intersections from a sweep or an existing CSV).

Failures print a machine-readable JSON error record to stderr and exit
nonzero.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace

import click
import numpy as np

from .config import AppConfig, ConfigError, load_config
from .coverage import Scenario, channel_hardening_kappa, irs_coverage_range
from .sweep import (
    compute_rows,
    read_rows_csv,
    report_crossovers,
    rows_to_csv,
    rows_to_json,
    table_to_csv,
    table_to_json,
)


def _fail(exc: BaseException) -> "NoReturn":  # noqa: F821
    record = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(record), err=True)
    sys.exit(2)


def _emit(text: str, out: str):
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(config: str, seed: int | None, samples: int | None) -> AppConfig:
    cfg = load_config(config)
    sim = cfg.simulation
    if seed is not None:
        sim = replace(sim, seed=seed)
    if samples is not None:
        sim = replace(sim, samples=samples)
    return replace(cfg, simulation=sim)


common_options = [
    click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--out", default="-", show_default=True, help="output path or - for stdout"),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
    click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="override simulation seed"),
    click.option("--samples", type=click.IntRange(1), default=None, help="override simulation sample count"),
    click.option("--jobs", type=click.IntRange(1), default=1, show_default=True),
]


def _with_common(fn):
    for opt in reversed(common_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Coverage analysis for IRS-aided links over Nakagami-m fading."""


def _run_sweep(config_path, out, fmt, seed, samples, jobs, with_timing, force_validate):
    try:
        cfg = _load(config_path, seed, samples)
        if cfg.sweep is None:
            raise ConfigError("config has no sweep section")
        if force_validate:
            cfg = replace(cfg, sweep=replace(cfg.sweep, validate=True))
        rows = compute_rows(cfg, jobs=jobs)
        text = (rows_to_csv(rows, cfg.sha256, with_timing) if fmt == "csv"
                else rows_to_json(rows, cfg.sha256, with_timing))
        _emit(text, out)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command()
@_with_common
@click.option("--with-timing", is_flag=True, help="include runtime_ms (breaks byte-identical output)")
def sweep(config_path, out, fmt, seed, samples, jobs, with_timing):
    """Run the sweep defined in the config."""
    _run_sweep(config_path, out, fmt, seed, samples, jobs, with_timing, False)


@main.command()
@_with_common
@click.option("--with-timing", is_flag=True, help="include runtime_ms (breaks byte-identical output)")
def validate(config_path, out, fmt, seed, samples, jobs, with_timing):
    """Run the sweep with the Monte-Carlo oracle alongside."""
    _run_sweep(config_path, out, fmt, seed, samples, jobs, with_timing, True)


@main.command(name="range")
@_with_common
@click.option("--alternate-constant", is_flag=True,
              help="also report the t/sqrt(2)-normalized range")
def range_cmd(config_path, out, fmt, seed, samples, jobs, alternate_constant):
    """IRS coverage range for the configured scenario (per sweep grid when
    the sweep variable is n_elements)."""
    try:
        cfg = _load(config_path, seed, samples)
        if cfg.sweep is not None and cfg.sweep.variable == "n_elements":
            n_grid = sorted({int(round(v)) for v in cfg.sweep.grid})
        else:
            n_grid = [cfg.system.n_elements]
        cols = ["n_elements", "d_star_m", "condition_value", "condition_ok",
                "outage_at_range"]
        if alternate_constant:
            cols.insert(2, "d_star_alt_m")
        rows = []
        for n in n_grid:
            sc = Scenario(cfg.geometry, cfg.fading, cfg.system.with_n_elements(n),
                          "irs_only", "asymptotic_clt")
            rr = irs_coverage_range(sc)
            row = {"n_elements": n, "d_star_m": rr.d_star,
                   "condition_value": rr.condition_value,
                   "condition_ok": rr.condition_ok,
                   "outage_at_range": rr.outage_at_range}
            if alternate_constant:
                row["d_star_alt_m"] = irs_coverage_range(sc, use_alternate_constant=True).d_star
            rows.append(row)
        text = (table_to_csv(cols, rows, cfg.sha256) if fmt == "csv"
                else table_to_json(cols, rows, cfg.sha256))
        _emit(text, out)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command()
@_with_common
@click.option("--shapes", default=None,
              help="comma-separated Nakagami shapes, e.g. 0.5,1,2 (default: config fading)")
def hardening(config_path, out, fmt, seed, samples, jobs, shapes):
    """Channel-hardening factor kappa over an element-count grid."""
    try:
        cfg = _load(config_path, seed, samples)
        if cfg.sweep is not None and cfg.sweep.variable == "n_elements":
            n_grid = sorted({int(round(v)) for v in cfg.sweep.grid})
        else:
            n_grid = sorted({int(round(v)) for v in np.logspace(0, 3, 25)})
        rows = []
        if shapes:
            m_list = [float(x) for x in shapes.split(",")]
            for n in n_grid:
                for m in m_list:
                    rows.append({"n_elements": n, "shape_m": m,
                                 "kappa": channel_hardening_kappa(n, m)})
            cols = ["n_elements", "shape_m", "kappa"]
        else:
            for n in n_grid:
                rows.append({"n_elements": n,
                             "kappa": channel_hardening_kappa(n, fading=cfg.fading)})
            cols = ["n_elements", "kappa"]
        text = (table_to_csv(cols, rows, cfg.sha256) if fmt == "csv"
                else table_to_json(cols, rows, cfg.sha256))
        _emit(text, out)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command()
@_with_common
@click.option("--rows", "rows_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="reuse rows from a previous sweep CSV instead of recomputing")
def crossover(config_path, out, fmt, seed, samples, jobs, rows_path):
    """Interpolated crossovers between per-mode coverage curves."""
    try:
        cfg = _load(config_path, seed, samples)
        if rows_path is not None:
            with open(rows_path, encoding="utf-8") as fh:
                rows = read_rows_csv(fh.read())
        else:
            if cfg.sweep is None:
                raise ConfigError("config has no sweep section and no --rows given")
            rows = compute_rows(cfg, jobs=jobs)
        crossings = report_crossovers(rows)
        cols = ["mode_a", "mode_b", "value", "coverage"]
        table = [{"mode_a": c.mode_a, "mode_b": c.mode_b,
                  "value": c.value, "coverage": c.coverage} for c in crossings]
        text = (table_to_csv(cols, table, cfg.sha256) if fmt == "csv"
                else table_to_json(cols, table, cfg.sha256))
        _emit(text, out)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


if __name__ == "__main__":
    main()
