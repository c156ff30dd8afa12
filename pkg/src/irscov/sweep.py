"""Sweep engine: evaluates coverage over a parameter grid (optionally with
the Monte-Carlo oracle alongside), finds mode crossovers, and reads/writes
plot-ready CSV/JSON.

Output determinism: rows are emitted in (grid point, mode) order, floats are
formatted with 12 significant digits, and wall-clock timing is kept out of
the default output so identical configs produce byte-identical files.
"""

from __future__ import annotations

import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .coverage import MODES, Scenario, coverage
from .inversion import InversionConfig
from .model import FadingConfig, NakagamiParams
from .montecarlo import SimConfig, simulate_coverage, simulate_threshold_curve

VARIABLES = ("theta_db", "n_elements", "distance_d", "shape_m")

CSV_COLUMNS = ("variable", "value", "mode", "regime", "probability",
               "abs_error", "mc_probability", "mc_std_error")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple
    modes: tuple = ("combined",)
    validate: bool = False

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise ValueError(f"modes must be a nonempty subset of {MODES}")


@dataclass(frozen=True)
class OutputRow:
    variable: str
    value: float
    mode: str
    regime: str
    probability: float
    abs_error: float
    mc_probability: float | None = None
    mc_std_error: float | None = None
    runtime_ms: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.probability <= 1.0):
            raise ValueError("probability out of range")
        if self.mc_probability is not None and not (0.0 <= self.mc_probability <= 1.0):
            raise ValueError("mc probability out of range")


def format_sig(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def scenario_for(cfg, variable: str, value: float, mode: str) -> Scenario:
    """Scenario for one grid point; ``cfg`` is an AppConfig-like object."""
    geom, fading, system = cfg.geometry, cfg.fading, cfg.system
    if variable == "theta_db":
        system = system.with_theta_db(float(value))
    elif variable == "n_elements":
        system = system.with_n_elements(int(round(value)))
    elif variable == "distance_d":
        geom = geom.with_distance(float(value))
    elif variable == "shape_m":
        fading = FadingConfig(
            NakagamiParams(float(value), fading.bs_irs.omega),
            NakagamiParams(float(value), fading.irs_ue.omega),
            NakagamiParams(float(value), fading.bs_ue.omega),
        )
    return Scenario(geom, fading, system, mode, cfg.regime)


def _point_seed(base_seed: int, index: int) -> int:
    state = np.random.SeedSequence(entropy=base_seed, spawn_key=(1000 + index,))
    return int(state.generate_state(1, np.uint64)[0])


def compute_rows(cfg, jobs: int = 1,
                 inversion: InversionConfig | None = None) -> list[OutputRow]:
    """One OutputRow per (grid point x mode), in grid-major order."""
    sweep: SweepSpec = cfg.sweep
    if sweep is None:
        raise ValueError("config has no sweep section")
    points = [(i, v, m) for i, v in enumerate(sweep.grid) for m in sweep.modes]

    def one(task):
        i, v, m = task
        sc = scenario_for(cfg, sweep.variable, v, m)
        start = time.perf_counter()
        res = coverage(sc, inversion)
        return OutputRow(sweep.variable, float(v), m, sc.regime,
                         res.probability, res.abs_error,
                         runtime_ms=1e3 * (time.perf_counter() - start))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(t) for t in points]

    if sweep.validate:
        rows = _attach_mc(cfg, sweep, rows)
    return rows


def _attach_mc(cfg, sweep: SweepSpec, rows: list[OutputRow]) -> list[OutputRow]:
    sim: SimConfig = cfg.simulation
    out = list(rows)
    if sweep.variable == "theta_db":
        # channel law is theta-independent: reuse one draw per mode
        thetas = [10.0 ** (v / 10.0) for v in sweep.grid]
        for mode in sweep.modes:
            sc = scenario_for(cfg, "theta_db", sweep.grid[0], mode)
            curve = simulate_threshold_curve(sc, thetas, sim)
            for i, est in enumerate(curve):
                k = i * len(sweep.modes) + sweep.modes.index(mode)
                out[k] = replace(out[k], mc_probability=est.coverage,
                                 mc_std_error=est.std_error)
    else:
        for k, row in enumerate(out):
            i = k // len(sweep.modes)
            sc = scenario_for(cfg, sweep.variable, row.value, row.mode)
            est = simulate_coverage(sc, replace(sim, seed=_point_seed(sim.seed, i)))
            out[k] = replace(out[k], mc_probability=est.coverage,
                             mc_std_error=est.std_error)
    return out


@dataclass(frozen=True)
class CrossoverRow:
    mode_a: str
    mode_b: str
    value: float     # interpolated sweep value where the curves intersect
    coverage: float  # common coverage at the intersection


def report_crossovers(rows: list[OutputRow], min_gap: float = 1e-6) -> list[CrossoverRow]:
    """Interpolated intersections between per-mode coverage curves; empty
    when curves do not cross. Needs rows from a single sweep.

    Sign changes where the curves never separate by more than ``min_gap`` on
    either side (e.g. two saturated curves jittering at numerical noise
    level) are not reported.
    """
    by_mode: dict[str, list[OutputRow]] = {}
    for r in rows:
        by_mode.setdefault(r.mode, []).append(r)
    modes = sorted(by_mode)
    out: list[CrossoverRow] = []
    for ia in range(len(modes)):
        for ib in range(ia + 1, len(modes)):
            a = sorted(by_mode[modes[ia]], key=lambda r: r.value)
            b = sorted(by_mode[modes[ib]], key=lambda r: r.value)
            xs = [r.value for r in a]
            if xs != [r.value for r in b]:
                raise ValueError("mode curves sampled on different grids")
            da = np.array([r.probability for r in a])
            db = np.array([r.probability for r in b])
            diff = da - db
            for i in range(len(xs) - 1):
                d0, d1 = diff[i], diff[i + 1]
                if max(abs(d0), abs(d1)) <= min_gap:
                    continue
                if d0 == 0.0 and (i == 0 or diff[i - 1] != 0.0):
                    out.append(CrossoverRow(modes[ia], modes[ib], xs[i], float(da[i])))
                elif d0 * d1 < 0.0:
                    w = d0 / (d0 - d1)
                    xc = xs[i] + w * (xs[i + 1] - xs[i])
                    cc = float(da[i] + w * (da[i + 1] - da[i]))
                    out.append(CrossoverRow(modes[ia], modes[ib], float(xc), cc))
    return out


# ---------------------------------------------------------------------------
# IO
# ---------------------------------------------------------------------------

def rows_to_csv(rows: list[OutputRow], config_sha: str = "", with_timing: bool = False) -> str:
    buf = io.StringIO()
    buf.write(f"# irscov {__version__} config_sha256={config_sha}\n")
    cols = CSV_COLUMNS + (("runtime_ms",) if with_timing else ())
    buf.write(",".join(cols) + "\n")
    for r in rows:
        vals = [r.variable, format_sig(r.value), r.mode, r.regime,
                format_sig(r.probability), format_sig(r.abs_error),
                format_sig(r.mc_probability), format_sig(r.mc_std_error)]
        if with_timing:
            vals.append(format_sig(r.runtime_ms))
        buf.write(",".join(vals) + "\n")
    return buf.getvalue()


def rows_to_json(rows: list[OutputRow], config_sha: str = "", with_timing: bool = False) -> str:
    def f(x):
        return None if x is None else float(format_sig(x))

    items = []
    for r in rows:
        item = {
            "variable": r.variable, "value": f(r.value), "mode": r.mode,
            "regime": r.regime, "probability": f(r.probability),
            "abs_error": f(r.abs_error), "mc_probability": f(r.mc_probability),
            "mc_std_error": f(r.mc_std_error),
        }
        if with_timing:
            item["runtime_ms"] = f(r.runtime_ms)
        items.append(item)
    doc = {"tool": "irscov", "version": __version__,
           "config_sha256": config_sha, "rows": items}
    return json.dumps(doc, indent=2) + "\n"


def read_rows_csv(text: str) -> list[OutputRow]:
    rows = []
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    for ln in lines[1:]:
        d = dict(zip(header, ln.split(",")))
        rows.append(OutputRow(
            variable=d["variable"], value=float(d["value"]), mode=d["mode"],
            regime=d["regime"], probability=float(d["probability"]),
            abs_error=float(d["abs_error"]),
            mc_probability=float(d["mc_probability"]) if d.get("mc_probability") else None,
            mc_std_error=float(d["mc_std_error"]) if d.get("mc_std_error") else None,
            runtime_ms=float(d["runtime_ms"]) if d.get("runtime_ms") else 0.0,
        ))
    return rows


def table_to_csv(colnames: list[str], rows: list[dict], config_sha: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# irscov {__version__} config_sha256={config_sha}\n")
    buf.write(",".join(colnames) + "\n")
    for r in rows:
        buf.write(",".join(
            format_sig(r[c]) if isinstance(r[c], float) else str(r[c])
            for c in colnames) + "\n")
    return buf.getvalue()


def table_to_json(colnames: list[str], rows: list[dict], config_sha: str = "") -> str:
    items = [{c: (float(format_sig(r[c])) if isinstance(r[c], float) else r[c])
              for c in colnames} for r in rows]
    doc = {"tool": "irscov", "version": __version__,
           "config_sha256": config_sha, "rows": items}
    return json.dumps(doc, indent=2) + "\n"
