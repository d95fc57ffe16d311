"""Parameter sweeps over both engines, emitted as diff-friendly CSV.

A sweep varies one parameter across a value grid and records any subset of
the association/coverage/rate outputs from the analytic engine, the Monte
Carlo engine, or both.  Output rows are deterministic: floats are serialized
with 17 significant digits (exact round trip), metadata lines carry the
resolved config digest instead of timestamps, and rows appear in input order
whatever the worker count.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__, analytic, montecarlo
from .channel import MimoConfig, SatelliteFading
from .config import SystemConfig, db_to_linear

PARAMETERS = ("N_S", "lambda_T", "M", "N_T", "P_t_S", "gamma_dB", "m", "h_S")
OUTPUTS = ("A_S", "A_T", "P_cov_T", "P_cov_S", "P_tot", "R_T", "R_S", "R_tot")
ENGINES = ("analytic", "montecarlo")

_COVERAGE_OUTPUTS = {"A_S", "A_T", "P_cov_T", "P_cov_S", "P_tot"}
_RATE_OUTPUTS = {"R_T", "R_S", "R_tot"}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    outputs: tuple[str, ...] = ("A_S", "P_tot", "R_tot")
    engines: tuple[str, ...] = ("analytic",)

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; "
                             f"expected one of {PARAMETERS}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("sweep values must be strictly monotone")
        for out in self.outputs:
            if out not in OUTPUTS:
                raise ValueError(f"unknown output {out!r}; expected subset of {OUTPUTS}")
        if not self.outputs:
            raise ValueError("sweep needs at least one output")
        for eng in self.engines:
            if eng not in ENGINES:
                raise ValueError(f"unknown engine {eng!r}; expected subset of {ENGINES}")
        if not self.engines:
            raise ValueError("sweep needs at least one engine")

    @staticmethod
    def from_dict(raw: dict) -> "SweepSpec":
        known = {"parameter", "values", "outputs", "engines"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown sweep keys {sorted(unknown)}")
        values = raw.get("values")
        if isinstance(values, dict):
            vk = set(values) - {"start", "stop", "count", "scale"}
            if vk:
                raise ValueError(f"unknown sweep range keys {sorted(vk)}")
            start, stop = float(values["start"]), float(values["stop"])
            count = int(values["count"])
            scale = values.get("scale", "linear")
            if count < 1:
                raise ValueError("sweep range count must be >= 1")
            if scale == "linear":
                step = (stop - start) / max(count - 1, 1)
                vals = tuple(start + i * step for i in range(count))
            elif scale == "log":
                if start <= 0 or stop <= 0:
                    raise ValueError("log-scale sweep needs positive endpoints")
                ratio = (stop / start) ** (1.0 / max(count - 1, 1))
                vals = tuple(start * ratio**i for i in range(count))
            else:
                raise ValueError(f"unknown sweep scale {scale!r}")
        else:
            vals = tuple(float(v) for v in values)
        kwargs = {}
        if "outputs" in raw:
            kwargs["outputs"] = tuple(raw["outputs"])
        if "engines" in raw:
            kwargs["engines"] = tuple(raw["engines"])
        return SweepSpec(parameter=raw["parameter"], values=vals, **kwargs)

    @staticmethod
    def load(path) -> "SweepSpec":
        return SweepSpec.from_dict(json.loads(Path(path).read_text()))


def apply_parameter(cfg: SystemConfig, name: str, value: float) -> SystemConfig:
    """A copy of the config with one swept parameter replaced."""
    t, s, a = cfg.terrestrial, cfg.satellite, cfg.analysis
    if name == "N_S":
        s = dataclasses.replace(s, geom=dataclasses.replace(s.geom, satellite_count=int(value)))
    elif name == "lambda_T":
        t = dataclasses.replace(t, bs_density=value)
    elif name == "M":
        t = dataclasses.replace(t, mimo=MimoConfig(t.mimo.antennas, int(value)))
    elif name == "N_T":
        t = dataclasses.replace(t, mimo=MimoConfig(int(value), t.mimo.users_per_cell))
    elif name == "P_t_S":
        s = dataclasses.replace(s, tx_power_w=value)
    elif name == "gamma_dB":
        a = dataclasses.replace(a, sinr_threshold=db_to_linear(value))
    elif name == "m":
        s = dataclasses.replace(s, fading=SatelliteFading(nakagami_m=value))
    elif name == "h_S":
        s = dataclasses.replace(s, geom=dataclasses.replace(s.geom, altitude_m=value))
    else:
        raise ValueError(f"unknown sweep parameter {name!r}")
    return dataclasses.replace(cfg, terrestrial=t, satellite=s, analysis=a)


@dataclass(frozen=True)
class SweepRow:
    value: float
    engine: str
    outputs: dict  # output name -> (value, uncertainty)
    error: str = ""


def _analytic_point(cfg: SystemConfig, outputs) -> dict:
    out = {}
    q = cfg.analysis.quadrature

    def bound(v: float) -> float:
        return q.rel_tol * abs(v) + q.abs_tol

    if _COVERAGE_OUTPUTS & set(outputs):
        cb = analytic.coverage_total(cfg)
        vals = {
            "A_S": cb.association_satellite,
            "A_T": cb.association_terrestrial,
            "P_cov_T": cb.coverage_terrestrial,
            "P_cov_S": cb.coverage_satellite,
            "P_tot": cb.coverage_total,
        }
        out.update({k: (v, bound(v)) for k, v in vals.items() if k in outputs})
    if _RATE_OUTPUTS & set(outputs):
        rb = analytic.rate_total(cfg)
        vals = {
            "R_T": rb.rate_terrestrial,
            "R_S": rb.rate_satellite,
            "R_tot": rb.rate_total,
        }
        out.update({k: (v, bound(v)) for k, v in vals.items() if k in outputs})
    return out


def _montecarlo_point(cfg: SystemConfig, outputs, mc: montecarlo.MonteCarloConfig) -> dict:
    res = montecarlo.run_trials(cfg, mc, workers=1)
    out = {}
    if _COVERAGE_OUTPUTS & set(outputs):
        cov = montecarlo.estimate_coverage(cfg, mc, cfg.analysis.sinr_threshold, outcomes=res)
        a_s = cov.association_satellite
        vals = {
            "A_S": (a_s.value, a_s.half_width_95),
            "A_T": (1.0 - a_s.value, a_s.half_width_95),
            "P_cov_T": (cov.terrestrial.value, cov.terrestrial.half_width_95),
            "P_cov_S": (cov.satellite.value, cov.satellite.half_width_95),
            "P_tot": (cov.total.value, cov.total.half_width_95),
        }
        out.update({k: v for k, v in vals.items() if k in outputs})
    if _RATE_OUTPUTS & set(outputs):
        rr = montecarlo.estimate_rate(cfg, mc, outcomes=res)
        vals = {
            "R_T": (rr.terrestrial.value, rr.terrestrial.half_width_95),
            "R_S": (rr.satellite.value, rr.satellite.half_width_95),
            "R_tot": (rr.total.value, rr.total.half_width_95),
        }
        out.update({k: v for k, v in vals.items() if k in outputs})
    return out


def _run_point(args) -> SweepRow:
    cfg, spec, value, engine, mc = args
    try:
        point_cfg = apply_parameter(cfg, spec.parameter, value)
        if engine == "analytic":
            outputs = _analytic_point(point_cfg, spec.outputs)
        else:
            outputs = _montecarlo_point(point_cfg, spec.outputs, mc)
        return SweepRow(value, engine, outputs)
    except Exception as exc:  # per-point failures land in the error column
        return SweepRow(value, engine, {}, error=f"{type(exc).__name__}: {exc}")


def run_sweep(
    cfg: SystemConfig,
    spec: SweepSpec,
    mc: Optional[montecarlo.MonteCarloConfig] = None,
    workers: Optional[int] = None,
) -> list[SweepRow]:
    """One row per (sweep value, engine), in input order."""
    mc = mc or montecarlo.MonteCarloConfig()
    tasks = [(cfg, spec, v, eng, mc) for v in spec.values for eng in spec.engines]
    n_workers = min(montecarlo.worker_count(workers), len(tasks))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(_run_point, tasks))
    return [_run_point(t) for t in tasks]


def _fmt(x: float) -> str:
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return str(x)
    return format(x, ".17g")


def rows_to_csv(
    cfg: SystemConfig,
    spec: SweepSpec,
    rows: list[SweepRow],
    mc: Optional[montecarlo.MonteCarloConfig] = None,
) -> str:
    """Render sweep rows with `#` metadata lines and a fixed header."""
    buf = io.StringIO()
    buf.write(f"# hybridnet {__version__} sweep\n")
    buf.write(f"# config_digest={cfg.digest()}\n")
    buf.write(f"# parameter={spec.parameter} engines={','.join(spec.engines)}\n")
    if mc is not None and "montecarlo" in spec.engines:
        buf.write(f"# trials={mc.trials} seed={mc.seed} "
                  f"constellation_mode={mc.constellation_mode} "
                  f"exact_satellite_interference={mc.exact_satellite_interference}\n")
    cols = [spec.parameter, "engine"]
    for name in spec.outputs:
        cols += [name, f"{name}_err"]
    cols.append("error")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        cells = [_fmt(row.value), row.engine]
        for name in spec.outputs:
            if name in row.outputs:
                v, e = row.outputs[name]
                cells += [_fmt(v), _fmt(e)]
            else:
                cells += ["", ""]
        cells.append(row.error.replace(",", ";"))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse a sweep CSV back into (metadata lines, row dictionaries)."""
    meta, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.append(line)
            continue
        cells = line.split(",")
        if header is None:
            header = cells
            continue
        row = dict(zip(header, cells))
        for key, val in row.items():
            if key not in ("engine", "error") and val:
                row[key] = float(val)
        rows.append(row)
    return meta, rows
