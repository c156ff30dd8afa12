"""YAML configuration: one file with {geometry, fading, system, sweep,
simulation} sections describing a scenario and an optional sweep.

Units at the config surface: angles in degrees, thresholds in dB, power in
watts, frequencies in Hz, distances in meters. Internally everything is
linear/radians.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
import yaml

from .model import (
    FadingConfig,
    LinkGeometry,
    NakagamiParams,
    SystemParams,
    noise_variance_w,
)
from .montecarlo import SimConfig
from .sweep import SweepSpec


@dataclass(frozen=True)
class AppConfig:
    geometry: LinkGeometry
    fading: FadingConfig
    system: SystemParams
    regime: str
    sweep: SweepSpec | None
    simulation: SimConfig
    sha256: str


class ConfigError(ValueError):
    pass


def _need(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return section[key]


def _fading_params(raw, where: str) -> NakagamiParams:
    if not isinstance(raw, dict):
        raise ConfigError(f"[{where}] must be a mapping with m/omega")
    return NakagamiParams(float(_need(raw, "m", where)), float(raw.get("omega", 1.0)))


def parse_config(raw: dict, sha256: str = "") -> AppConfig:
    try:
        geo = _need(raw, "geometry", "config")
        geometry = LinkGeometry(
            r=float(_need(geo, "bs_irs_m", "geometry")),
            d=float(_need(geo, "irs_ue_m", "geometry")),
            psi=math.radians(float(_need(geo, "angle_deg", "geometry"))),
            alpha=float(geo.get("path_loss_exponent", 4.0)),
            zeta=float(geo["zeta"]) if "zeta" in geo else None,
            carrier_hz=float(geo["carrier_hz"]) if "carrier_hz" in geo else None,
        )
        fad = _need(raw, "fading", "config")
        fading = FadingConfig(
            bs_irs=_fading_params(_need(fad, "bs_irs", "fading"), "fading.bs_irs"),
            irs_ue=_fading_params(_need(fad, "irs_ue", "fading"), "fading.irs_ue"),
            bs_ue=_fading_params(_need(fad, "bs_ue", "fading"), "fading.bs_ue"),
        )
        sysec = _need(raw, "system", "config")
        if "noise_w" in sysec:
            noise = float(sysec["noise_w"])
        else:
            noise = noise_variance_w(
                psd_dbm_per_hz=float(sysec.get("noise_psd_dbm_per_hz", -174.0)),
                bandwidth_hz=float(sysec.get("bandwidth_hz", 1e8)),
                noise_figure_db=float(sysec.get("noise_figure_db", 10.0)),
            )
        system = SystemParams(
            power_w=float(_need(sysec, "power_w", "system")),
            noise_var=noise,
            n_elements=int(_need(sysec, "n_elements", "system")),
            theta=10.0 ** (float(_need(sysec, "theta_db", "system")) / 10.0),
        )
        regime = str(sysec.get("regime", "asymptotic_clt"))

        sweep = None
        if "sweep" in raw and raw["sweep"]:
            sw = raw["sweep"]
            if "grid" in sw:
                grid = tuple(float(v) for v in sw["grid"])
            else:
                start = float(_need(sw, "start", "sweep"))
                stop = float(_need(sw, "stop", "sweep"))
                points = int(_need(sw, "points", "sweep"))
                spacing = str(sw.get("spacing", "linear"))
                if spacing == "linear":
                    grid = tuple(np.linspace(start, stop, points).tolist())
                elif spacing == "log":
                    if start <= 0:
                        raise ConfigError("log spacing needs start > 0")
                    grid = tuple(np.logspace(math.log10(start), math.log10(stop), points).tolist())
                else:
                    raise ConfigError(f"unknown spacing {spacing!r}")
            sweep = SweepSpec(
                variable=str(_need(sw, "variable", "sweep")),
                grid=grid,
                modes=tuple(sw.get("modes", ["combined"])),
                validate=bool(sw.get("validate", False)),
            )

        sim = raw.get("simulation", {}) or {}
        simulation = SimConfig(
            samples=int(sim.get("samples", 100_000)),
            seed=int(sim.get("seed", 12345)),
            streams=int(sim.get("streams", 4)),
            antithetic=bool(sim.get("antithetic", False)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return AppConfig(geometry, fading, system, regime, sweep, simulation, sha256)


def load_config(path: str) -> AppConfig:
    with open(path, "rb") as fh:
        blob = fh.read()
    sha = hashlib.sha256(blob).hexdigest()
    try:
        raw = yaml.safe_load(blob)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse failure: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return parse_config(raw, sha)
