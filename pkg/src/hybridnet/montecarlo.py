"""Monte Carlo simulation of the hybrid downlink: the independent oracle.

Every trial drops a fresh Poisson field of base stations in a disk around the
user, a fresh constellation on the orbital sphere, associates by the larger
mean received power (nearest BS vs lowest visible satellite), draws the ZF /
Nakagami fading gains, and computes the exact SINR with per-interferer sums;
optionally the satellite interference is replaced by its analytic mean to
isolate that approximation.

Determinism contract: trials are partitioned into fixed-size blocks; block b
draws from a child generator spawned as SeedSequence(seed, spawn_key=(b,)),
and results are concatenated in block order.  The outcome is therefore
bit-identical for a given (config, mc-config) regardless of how many worker
processes execute the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analytic
from .config import SystemConfig
from .geometry import ConstellationGeometry, path_loss_constant
from .numerics.quadrature import Estimate

_BLOCK_SIZE = 500

TERRESTRIAL, SATELLITE, OUTAGE = 0, 1, 2
_ASSOC_NAMES = {TERRESTRIAL: "terrestrial", SATELLITE: "satellite", OUTAGE: "outage"}


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 100_000
    seed: int = 1
    bs_region_radius_m: Optional[float] = None  # None: smallest radius meeting the tail bound (>= 300 km)
    constellation_mode: str = "binomial"  # or "poisson"
    exact_satellite_interference: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.constellation_mode not in ("binomial", "poisson"):
            raise ValueError(f"unknown constellation mode {self.constellation_mode!r}")
        if self.bs_region_radius_m is not None and self.bs_region_radius_m <= 0.0:
            raise ValueError("bs_region_radius_m must be positive")


def truncated_tail_fraction(cfg: SystemConfig, radius_m: float) -> float:
    """Expected interference lost beyond the disk, relative to the in-disk
    mean seen from the median nearest-BS distance (closed-form power-law
    tail integrals)."""
    t = cfg.terrestrial
    eta = t.path_loss_exponent
    r_typ = math.sqrt(math.log(2.0) / (math.pi * t.bs_density))
    if radius_m <= r_typ:
        return math.inf
    tail = radius_m ** (2.0 - eta)
    in_disk = r_typ ** (2.0 - eta) - tail
    return tail / in_disk


def resolve_region_radius(cfg: SystemConfig, mc: MonteCarloConfig) -> float:
    """Effective BS-field radius; validates the < 0.1% truncation bound.

    The automatic radius is the smallest one meeting the bound, at least
    300 km, but never beyond 10,000 km: below ~2e-12 BS/m^2 the terrestrial
    tier is effectively absent and inflating the disk further would only
    manufacture astronomically distant stations.
    """
    t = cfg.terrestrial
    eta = t.path_loss_exponent
    r_typ = math.sqrt(math.log(2.0) / (math.pi * t.bs_density))
    if mc.bs_region_radius_m is None:
        auto = r_typ * (1.0 + 1e3) ** (1.0 / (eta - 2.0))
        return min(max(300e3, auto), 1e7)
    frac = truncated_tail_fraction(cfg, mc.bs_region_radius_m)
    if frac > 1e-3:
        raise ValueError(
            f"bs_region_radius_m={mc.bs_region_radius_m!r} leaves a truncated "
            f"interference tail of {frac:.2%} (> 0.1%) at this BS density"
        )
    return float(mc.bs_region_radius_m)


def worker_count(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("HYBRIDNET_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialOutcome:
    association: str  # terrestrial | satellite | outage
    serving_distance_or_angle: float  # meters or radians; nan for outage
    sinr: float
    rate_sample: float  # bit/s


@dataclass(frozen=True)
class SimulationResult:
    """Column arrays over all trials, in block order."""

    association: np.ndarray  # int8 codes
    serving: np.ndarray  # distance (m) or angle (rad); nan for outage
    sinr: np.ndarray
    rate: np.ndarray  # bit/s
    contact_angle: np.ndarray  # min visible satellite angle per trial; nan if none

    @property
    def n(self) -> int:
        return self.association.size

    def outage_fraction(self) -> float:
        return float(np.mean(self.association == OUTAGE))


def sample_bs_field(cfg: SystemConfig, mc: MonteCarloConfig, rng: np.random.Generator) -> np.ndarray:
    """Sorted distances of one Poisson BS field in the sampling disk."""
    radius = resolve_region_radius(cfg, mc)
    k = rng.poisson(cfg.terrestrial.bs_density * math.pi * radius * radius)
    return np.sort(radius * np.sqrt(rng.random(k)))


def sample_constellation(
    geom: ConstellationGeometry, mode: str, rng: np.random.Generator
) -> np.ndarray:
    """Sorted zenith angles of the visible satellites of one constellation.

    Uniform placement on the sphere (cos of the polar angle uniform on
    [-1, 1]); binomial mode drops exactly N_S satellites, poisson mode draws
    the count first.
    """
    n = geom.satellite_count
    if mode == "poisson":
        n = int(rng.poisson(n))
    if n == 0:
        return np.empty(0)
    cos_t = rng.uniform(-1.0, 1.0, size=n)
    visible = cos_t[cos_t >= geom.alpha]
    return np.sort(np.arccos(visible)) if visible.size else np.empty(0)


class _TrialEngine:
    """Per-process precomputed constants plus the single-trial core."""

    def __init__(self, cfg: SystemConfig, mc: MonteCarloConfig):
        self.cfg = cfg
        self.mc = mc
        t, s = cfg.terrestrial, cfg.satellite
        g = s.geom
        self.radius = resolve_region_radius(cfg, mc)
        self.mean_bs = t.bs_density * math.pi * self.radius**2
        self.eta = t.path_loss_exponent
        self.p_t = t.tx_power_w
        self.m_serve = t.mimo.serving_shape
        self.m_intf = t.mimo.interferer_shape
        self.noise_t = t.noise_w
        self.bw_t = t.bandwidth_hz
        self.n_sat = g.satellite_count
        self.alpha = g.alpha
        self.slant_a = g.earth_radius_m**2 + g.orbit_radius_m**2
        self.slant_b = 2.0 * g.earth_radius_m * g.orbit_radius_m
        self.sat_eirp_main = s.tx_power_w * s.main_lobe_gain * path_loss_constant(s.carrier_hz)
        self.sat_eirp_side = s.tx_power_w * s.side_lobe_gain * path_loss_constant(s.carrier_hz)
        self.nakagami_m = s.fading.nakagami_m
        self.noise_s = s.noise_w
        self.bw_s = s.bandwidth_hz

    def run(self, rng: np.random.Generator, out, i: int):
        assoc, serving, sinr, rate, contact = out

        k = rng.poisson(self.mean_bs)
        r = self.radius * np.sqrt(rng.random(k)) if k else np.empty(0)

        n = self.n_sat
        if self.mc.constellation_mode == "poisson" and n:
            n = int(rng.poisson(n))
        cos_t = rng.uniform(-1.0, 1.0, size=n) if n else np.empty(0)
        cos_vis = cos_t[cos_t >= self.alpha]

        mean_t = -math.inf
        if k:
            i_near = int(np.argmin(r))
            r0 = float(r[i_near])
            mean_t = self.p_t * r0 ** (-self.eta) * self.m_serve
        mean_s = -math.inf
        if cos_vis.size:
            j_near = int(np.argmax(cos_vis))
            slant0_sq = self.slant_a - self.slant_b * float(cos_vis[j_near])
            mean_s = self.sat_eirp_main / slant0_sq

        if mean_t == -math.inf and mean_s == -math.inf:
            assoc[i] = OUTAGE
            serving[i] = math.nan
            sinr[i] = 0.0
            rate[i] = 0.0
            contact[i] = math.nan
            return

        contact[i] = math.acos(float(np.max(cos_vis))) if cos_vis.size else math.nan

        if mean_t >= mean_s:
            g0 = rng.gamma(self.m_serve)
            gains = rng.gamma(self.m_intf, 1.0, size=k)
            power = self.p_t * r ** (-self.eta) * gains
            interference = float(power.sum() - power[i_near])
            assoc[i] = TERRESTRIAL
            serving[i] = r0
            sinr[i] = self.p_t * r0 ** (-self.eta) * g0 / (interference + self.noise_t)
            rate[i] = self.bw_t * math.log2(1.0 + sinr[i])
        else:
            scale = 1.0 / self.nakagami_m
            omega0 = rng.gamma(self.nakagami_m) * scale
            if self.mc.exact_satellite_interference:
                omegas = rng.gamma(self.nakagami_m, scale, size=cos_vis.size)
                power = self.sat_eirp_side / (self.slant_a - self.slant_b * cos_vis) * omegas
                interference = float(power.sum() - power[j_near])
            else:
                interference = float(
                    analytic._mean_interference_batch(self.cfg, np.array([contact[i]]))[0]
                )
            assoc[i] = SATELLITE
            serving[i] = contact[i]
            sinr[i] = self.sat_eirp_main / slant0_sq * omega0 / (interference + self.noise_s)
            rate[i] = self.bw_s * math.log2(1.0 + sinr[i])


def simulate_trial(cfg: SystemConfig, mc: MonteCarloConfig, rng: np.random.Generator) -> TrialOutcome:
    """One network realization under the caller's generator."""
    out = tuple(np.empty(1) for _ in range(5))
    _TrialEngine(cfg, mc).run(rng, out, 0)
    assoc, serving, sinr, rate, _ = (float(a[0]) for a in out)
    return TrialOutcome(_ASSOC_NAMES[int(assoc)], serving, sinr, rate)


def _run_block(cfg: SystemConfig, mc: MonteCarloConfig, block: int, n: int) -> tuple:
    engine = _TrialEngine(cfg, mc)
    rng = np.random.default_rng(np.random.SeedSequence(mc.seed, spawn_key=(block,)))
    out = (
        np.empty(n, dtype=np.int8),
        np.empty(n),
        np.empty(n),
        np.empty(n),
        np.empty(n),
    )
    for i in range(n):
        engine.run(rng, out, i)
    return out


def run_trials(
    cfg: SystemConfig, mc: MonteCarloConfig, workers: Optional[int] = None
) -> SimulationResult:
    """All trials, block-deterministic; worker processes only change wall time."""
    blocks = [
        (b, min(_BLOCK_SIZE, mc.trials - b * _BLOCK_SIZE))
        for b in range((mc.trials + _BLOCK_SIZE - 1) // _BLOCK_SIZE)
    ]
    n_workers = min(worker_count(workers), len(blocks))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_run_block,
                                    (cfg for _ in blocks),
                                    (mc for _ in blocks),
                                    (b for b, _ in blocks),
                                    (n for _, n in blocks),
                                    chunksize=max(1, len(blocks) // (4 * n_workers))))
    else:
        results = [_run_block(cfg, mc, b, n) for b, n in blocks]
    cols = [np.concatenate([r[j] for r in results]) for j in range(5)]
    return SimulationResult(*cols)


# ---------------------------------------------------------------------------
# estimators


def _proportion(mask: np.ndarray, n: int) -> Estimate:
    p = float(mask.sum()) / n if n else math.nan
    hw = 1.96 * math.sqrt(p * (1.0 - p) / n) if n else math.nan
    return Estimate(p, hw, n)


def _mean(x: np.ndarray) -> Estimate:
    n = x.size
    if n == 0:
        return Estimate(math.nan, math.nan, 0)
    m = float(x.mean())
    hw = 1.96 * float(x.std(ddof=1)) / math.sqrt(n) if n > 1 else math.inf
    return Estimate(m, hw, n)


@dataclass(frozen=True)
class CoverageEstimates:
    total: Estimate
    terrestrial: Estimate  # conditional on terrestrial association
    satellite: Estimate  # conditional on satellite association
    association_satellite: Estimate
    outage_fraction: float


def estimate_coverage(
    cfg: SystemConfig,
    mc: MonteCarloConfig,
    threshold: float,
    outcomes: Optional[SimulationResult] = None,
    workers: Optional[int] = None,
) -> CoverageEstimates:
    """Fraction of trials with SINR above the threshold, total and per tier;
    outage trials count as uncovered."""
    res = outcomes if outcomes is not None else run_trials(cfg, mc, workers)
    covered = (res.sinr >= threshold) & (res.association != OUTAGE)
    terr = res.association == TERRESTRIAL
    sat = res.association == SATELLITE
    return CoverageEstimates(
        total=_proportion(covered, res.n),
        terrestrial=_proportion(covered[terr], int(terr.sum())),
        satellite=_proportion(covered[sat], int(sat.sum())),
        association_satellite=_proportion(sat, res.n),
        outage_fraction=res.outage_fraction(),
    )


@dataclass(frozen=True)
class RateEstimates:
    total: Estimate
    terrestrial: Estimate
    satellite: Estimate


def estimate_rate(
    cfg: SystemConfig,
    mc: MonteCarloConfig,
    outcomes: Optional[SimulationResult] = None,
    workers: Optional[int] = None,
) -> RateEstimates:
    """Mean per-trial rate B log2(1 + SINR), total and per tier."""
    res = outcomes if outcomes is not None else run_trials(cfg, mc, workers)
    return RateEstimates(
        total=_mean(res.rate),
        terrestrial=_mean(res.rate[res.association == TERRESTRIAL]),
        satellite=_mean(res.rate[res.association == SATELLITE]),
    )


class InsufficientSamplesError(RuntimeError):
    pass


def _ks_distance(samples: np.ndarray, cdf_at_samples: np.ndarray) -> float:
    n = samples.size
    order = np.argsort(samples)
    f = cdf_at_samples[order]
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(np.abs(f - i / n), np.abs(f - (i - 1) / n))))


@dataclass(frozen=True)
class ServingDistributionStats:
    ks_terrestrial: float
    ks_satellite: float
    ks_contact_angle: float
    n_terrestrial: int
    n_satellite: int


def _terrestrial_cdf_grid(cfg: SystemConfig, n: int = 200_000):
    lam = cfg.terrestrial.bs_density
    end = analytic._support_end(cfg)
    xs = np.linspace(0.0, end, n)
    if cfg.satellite.geom.satellite_count == 0:
        return xs, -np.expm1(-math.pi * lam * xs * xs)
    pdf = analytic._serving_pdf_batch(cfg, xs)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(xs))])
    return xs, cdf


def _satellite_cdf_grid(cfg: SystemConfig, n: int = 100_000):
    phi = np.linspace(0.0, cfg.satellite.geom.max_zenith_rad, n)
    pdf = analytic._serving_angle_pdf_batch(cfg, phi)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(phi))])
    return phi, cdf


def empirical_serving_distributions(
    cfg: SystemConfig,
    mc: MonteCarloConfig,
    outcomes: Optional[SimulationResult] = None,
    workers: Optional[int] = None,
) -> ServingDistributionStats:
    """Kolmogorov-Smirnov distances of the conditioned serving samples (and
    the raw contact angle) against the closed-form laws."""
    res = outcomes if outcomes is not None else run_trials(cfg, mc, workers)
    dist = res.serving[res.association == TERRESTRIAL]
    ang = res.serving[res.association == SATELLITE]
    if dist.size < 100 or ang.size < 100:
        raise InsufficientSamplesError(
            f"insufficient conditioned samples (terrestrial {dist.size}, satellite {ang.size})"
        )
    xs, cdf_t = _terrestrial_cdf_grid(cfg)
    ks_t = _ks_distance(dist, np.interp(dist, xs, cdf_t))
    phis, cdf_s = _satellite_cdf_grid(cfg)
    ks_s = _ks_distance(ang, np.interp(ang, phis, cdf_s))

    contact = res.contact_angle[np.isfinite(res.contact_angle)]
    n_s = cfg.satellite.geom.satellite_count
    cdf_contact = -np.expm1(-0.5 * n_s * (1.0 - np.cos(contact))) if contact.size else np.empty(0)
    ks_c = _ks_distance(contact, cdf_contact) if contact.size else math.nan
    return ServingDistributionStats(ks_t, ks_s, ks_c, dist.size, ang.size)
