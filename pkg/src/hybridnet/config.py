"""System configuration: the single source of every parameter.

dB and dBm values are accepted only at the file/CLI boundary (keys suffixed
_dB / _dBm) and stored linear / in watts internally.  Unknown JSON keys are
rejected so a typo cannot silently fall back to a default.  The terrestrial
carrier frequency is carried for completeness but no formula consumes it:
the terrestrial link uses a pure r^-eta power law with no frequency constant.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import MimoConfig, SatelliteFading
from .geometry import ConstellationGeometry
from .numerics.quadrature import QuadratureSpec


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watt(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class TerrestrialConfig:
    bs_density: float = 5e-9  # BS per m^2
    tx_power_w: float = 40.0
    path_loss_exponent: float = 4.0
    noise_w: float = dbm_to_watt(-140.0)
    bandwidth_hz: float = 50e6
    carrier_hz: float = 2.5e9  # stored, unused by the power-law link model
    mimo: MimoConfig = field(default_factory=MimoConfig)

    def __post_init__(self):
        for name in ("bs_density", "tx_power_w", "noise_w", "bandwidth_hz", "carrier_hz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"terrestrial {name} must be positive")
        if self.path_loss_exponent <= 2.0:
            raise ValueError(
                "path-loss exponent must exceed 2 (interference integral diverges)"
            )


@dataclass(frozen=True)
class SatelliteConfig:
    geom: ConstellationGeometry = field(default_factory=ConstellationGeometry)
    tx_power_w: float = 50.0
    main_lobe_gain: float = db_to_linear(20.0)
    side_lobe_gain: float = db_to_linear(5.0)
    noise_w: float = dbm_to_watt(-135.0)
    bandwidth_hz: float = 200e6
    carrier_hz: float = 2e9
    fading: SatelliteFading = field(default_factory=SatelliteFading)

    def __post_init__(self):
        for name in ("tx_power_w", "main_lobe_gain", "side_lobe_gain", "noise_w",
                     "bandwidth_hz", "carrier_hz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"satellite {name} must be positive")
        if self.side_lobe_gain >= self.main_lobe_gain:
            raise ValueError("side-lobe gain must stay below the main-lobe gain")


@dataclass(frozen=True)
class AnalysisConfig:
    sinr_threshold: float = 1.0  # linear; 0 dB default
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.sinr_threshold <= 0.0:
            raise ValueError("SINR threshold must be positive (linear units)")


@dataclass(frozen=True)
class SystemConfig:
    terrestrial: TerrestrialConfig = field(default_factory=TerrestrialConfig)
    satellite: SatelliteConfig = field(default_factory=SatelliteConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)

    def replaced(self, **kwargs) -> "SystemConfig":
        return dataclasses.replace(self, **kwargs)

    def canonical_dict(self) -> dict:
        """Flat, fully-resolved parameter dictionary (linear units)."""
        t, s, a = self.terrestrial, self.satellite, self.analysis
        return {
            "terrestrial": {
                "bs_density": t.bs_density,
                "tx_power_w": t.tx_power_w,
                "path_loss_exponent": t.path_loss_exponent,
                "noise_w": t.noise_w,
                "bandwidth_hz": t.bandwidth_hz,
                "carrier_hz": t.carrier_hz,
                "antennas": t.mimo.antennas,
                "users_per_cell": t.mimo.users_per_cell,
            },
            "satellite": {
                "count": s.geom.satellite_count,
                "altitude_m": s.geom.altitude_m,
                "earth_radius_m": s.geom.earth_radius_m,
                "tx_power_w": s.tx_power_w,
                "main_lobe_gain": s.main_lobe_gain,
                "side_lobe_gain": s.side_lobe_gain,
                "noise_w": s.noise_w,
                "bandwidth_hz": s.bandwidth_hz,
                "carrier_hz": s.carrier_hz,
                "nakagami_m": s.fading.nakagami_m,
            },
            "analysis": {
                "sinr_threshold": a.sinr_threshold,
                "rel_tol": a.quadrature.rel_tol,
                "abs_tol": a.quadrature.abs_tol,
                "max_subdivisions": a.quadrature.max_subdivisions,
            },
        }

    def digest(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def table1_config() -> SystemConfig:
    """The default rural parameter set."""
    return SystemConfig()


class ConfigError(ValueError):
    """Config file failed to parse or validate; message carries the field path."""


# JSON schema: section -> key -> setter path.  Values land in the kwargs dict
# for the section's dataclass after any unit conversion.
_SCHEMA = {
    "terrestrial": {
        "lambda_T": ("bs_density", float),
        "P_t_T_W": ("tx_power_w", float),
        "eta": ("path_loss_exponent", float),
        "sigma2_T_dBm": ("noise_w", dbm_to_watt),
        "B_T_Hz": ("bandwidth_hz", float),
        "f_T_Hz": ("carrier_hz", float),
    },
    "mimo": {
        "N_T": ("antennas", int),
        "M": ("users_per_cell", int),
    },
    "satellite": {
        "N_S": ("satellite_count", int),
        "h_S_m": ("altitude_m", float),
        "R_e_m": ("earth_radius_m", float),
        "P_t_S_W": ("tx_power_w", float),
        "G_So_dB": ("main_lobe_gain", db_to_linear),
        "G_S_dB": ("side_lobe_gain", db_to_linear),
        "sigma2_S_dBm": ("noise_w", dbm_to_watt),
        "B_S_Hz": ("bandwidth_hz", float),
        "f_S_Hz": ("carrier_hz", float),
    },
    "fading": {
        "m": ("nakagami_m", float),
    },
    "analysis": {
        "gamma_dB": ("sinr_threshold", db_to_linear),
        "quadrature": None,  # nested, handled explicitly
    },
    "montecarlo": {
        "trials": ("trials", int),
        "seed": ("seed", int),
        "bs_region_radius_m": ("bs_region_radius_m", lambda v: None if v is None else float(v)),
        "constellation_mode": ("constellation_mode", str),
        "exact_satellite_interference": ("exact_satellite_interference", bool),
    },
}
_QUAD_SCHEMA = {
    "rel_tol": float,
    "abs_tol": float,
    "max_subdivisions": int,
}


def _collect(section: str, data: dict) -> dict:
    schema = _SCHEMA[section]
    out = {}
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown key '{section}.{key}'")
        if schema[key] is None:
            continue
        name, conv = schema[key]
        try:
            out[name] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for '{section}.{key}': {exc}") from exc
    return out


def config_from_dict(raw: dict) -> SystemConfig:
    """Build a validated SystemConfig from a parsed JSON document.

    Missing sections and keys take the defaults; any 'montecarlo' section is
    ignored here (the Monte Carlo loader reads it separately).
    """
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    for key in raw:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown section '{key}'")

    geom_kw = {}
    sat_kw = {}
    for name, value in _collect("satellite", raw.get("satellite", {})).items():
        (geom_kw if name in ("satellite_count", "altitude_m", "earth_radius_m") else sat_kw)[name] = value
    fade_kw = _collect("fading", raw.get("fading", {}))
    terr_kw = _collect("terrestrial", raw.get("terrestrial", {}))
    mimo_kw = _collect("mimo", raw.get("mimo", {}))

    analysis_raw = dict(raw.get("analysis", {}))
    quad_raw = analysis_raw.pop("quadrature", {})
    ana_kw = _collect("analysis", analysis_raw)
    quad_kw = {}
    if quad_raw:
        for key, value in quad_raw.items():
            if key not in _QUAD_SCHEMA:
                raise ConfigError(f"unknown key 'analysis.quadrature.{key}'")
            quad_kw[key] = _QUAD_SCHEMA[key](value)

    try:
        return SystemConfig(
            terrestrial=TerrestrialConfig(mimo=MimoConfig(**mimo_kw), **terr_kw),
            satellite=SatelliteConfig(
                geom=ConstellationGeometry(**geom_kw),
                fading=SatelliteFading(**fade_kw),
                **sat_kw,
            ),
            analysis=AnalysisConfig(quadrature=QuadratureSpec(**quad_kw), **ana_kw),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> SystemConfig:
    """Parse and validate a JSON config file; empty object means Table-I defaults."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    return config_from_dict(raw)


def montecarlo_section(path_or_raw) -> dict:
    """Extract the validated 'montecarlo' section (raw kwargs) from a config file."""
    if isinstance(path_or_raw, (str, Path)):
        raw = json.loads(Path(path_or_raw).read_text())
    else:
        raw = path_or_raw
    return _collect("montecarlo", raw.get("montecarlo", {}))
