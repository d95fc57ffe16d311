"""Closed-form association, serving distributions, coverage, and rate.

The user attaches to whichever tier offers the larger mean received power:
the nearest base station (mean P_t,T r^-eta m_o) or the lowest-angle visible
satellite (mean P_t,S G_main l(phi)).  Everything downstream conditions on
that choice:

* association probabilities integrate the nearest-BS void probability
  against the contact-angle density;
* the terrestrial serving-distance density is the nearest-BS density thinned
  by the probability that no satellite beats the BS, which switches on beyond
  the distance where even a nadir satellite wins and cuts off where even a
  horizon-grazing one does;
* terrestrial coverage averages a Gamma-tail sum whose q-th terms are read
  off a truncated Taylor expansion of exp(-s sigma^2) L_I(s) around
  s = gamma x^eta / P; the Laplace transform of the interference field is the
  standard hypergeometric exponent;
* satellite coverage replaces the satellite interference by its mean
  (Campbell sum over the visible cap) inside a Nakagami tail;
* rates integrate the same coverage kernels over thresholds, bandwidth-scaled.

With no satellites configured (count 0) the satellite tier vanishes: the
serving-distance density reduces to the plain nearest-BS law on [0, inf) and
all satellite-side quantities are zero.

The threshold-sum series is evaluated in the variable u = (s - s0)/(-s0), in
which every retained term is a non-negative expectation, so the sum carries
no sign cancellation; a compensated accumulation is used regardless.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .config import SystemConfig
from .geometry import boundary_distance, path_loss_constant
from .numerics.quadrature import Estimate, QuadratureSpec, integrate, integrate_semi_infinite
from .numerics.series import TruncatedSeries, series_exp_batch
from .numerics.special import gauss_2f1_scaled_shift_table, gauss_2f1_shift_table

LN2 = math.log(2.0)


class NumericalError(RuntimeError):
    """A numeric invariant failed badly enough that clamping would hide a bug."""


@dataclass(frozen=True)
class CoverageBreakdown:
    association_terrestrial: float
    association_satellite: float
    coverage_terrestrial: float
    coverage_satellite: float
    coverage_total: float


@dataclass(frozen=True)
class RateBreakdown:
    rate_terrestrial: float
    rate_satellite: float
    rate_total: float


# ---------------------------------------------------------------------------
# derived geometry helpers


def _slant_sq(cfg: SystemConfig, phi):
    g = cfg.satellite.geom
    a = g.earth_radius_m**2 + g.orbit_radius_m**2
    b = 2.0 * g.earth_radius_m * g.orbit_radius_m
    return a - b * np.cos(phi)


def _power_match_distance(cfg: SystemConfig, phi):
    """E(d(phi)): terrestrial distance with the same mean power as a
    satellite at zenith angle phi."""
    t, s = cfg.terrestrial, cfg.satellite
    lo = path_loss_constant(s.carrier_hz)
    k = (t.tx_power_w * t.mimo.serving_shape) / (s.tx_power_w * s.main_lobe_gain * lo)
    eta = t.path_loss_exponent
    return k ** (1.0 / eta) * _slant_sq(cfg, phi) ** (1.0 / eta)


@functools.lru_cache(maxsize=256)
def _breakpoints(cfg: SystemConfig) -> tuple[float, float]:
    """Serving-distance branch edges: nadir-match and beyond-horizon-match."""
    g = cfg.satellite.geom
    bp1 = boundary_distance(cfg, g.altitude_m)
    bp2 = boundary_distance(cfg, math.hypot(g.earth_radius_m, g.orbit_radius_m))
    return bp1, bp2


def _contact_pdf_arr(cfg: SystemConfig, phi):
    n = cfg.satellite.geom.satellite_count
    return 0.5 * n * np.sin(phi) * np.exp(-0.5 * n * (1.0 - np.cos(phi)))


def _support_end(cfg: SystemConfig) -> float:
    if cfg.satellite.geom.satellite_count == 0:
        # cap the nearest-BS support where the residual mass is ~1e-16
        return math.sqrt(37.0 / (math.pi * cfg.terrestrial.bs_density))
    return _breakpoints(cfg)[1]


# ---------------------------------------------------------------------------
# association probabilities


@functools.lru_cache(maxsize=256)
def _association_satellite_cached(cfg: SystemConfig) -> float:
    if cfg.satellite.geom.satellite_count == 0:
        return 0.0
    lam = cfg.terrestrial.bs_density
    phi_max = cfg.satellite.geom.max_zenith_rad

    def integrand(phi):
        x = _power_match_distance(cfg, phi)
        return np.exp(-math.pi * lam * x * x) * _contact_pdf_arr(cfg, phi)

    est = integrate(integrand, 0.0, phi_max, cfg.analysis.quadrature, vectorized=True)
    return min(max(est.value, 0.0), 1.0)


def association_prob_satellite(cfg: SystemConfig) -> float:
    """Probability the max-mean-power rule picks a satellite."""
    return _association_satellite_cached(cfg)


def association_prob_terrestrial(cfg: SystemConfig) -> float:
    return 1.0 - _association_satellite_cached(cfg)


# ---------------------------------------------------------------------------
# serving distributions


def _thinning(cfg: SystemConfig, x: np.ndarray) -> np.ndarray:
    """P[no satellite outpowers a BS at distance x]; 1 below the first branch
    edge, 0 beyond the second."""
    g = cfg.satellite.geom
    if g.satellite_count == 0:
        return np.ones_like(x)
    bp1, bp2 = _breakpoints(cfg)
    t, s = cfg.terrestrial, cfg.satellite
    lo = path_loss_constant(s.carrier_hz)
    k = (t.tx_power_w * t.mimo.serving_shape) / (s.tx_power_w * s.main_lobe_gain * lo)
    a = g.earth_radius_m**2 + g.orbit_radius_m**2
    b = 2.0 * g.earth_radius_m * g.orbit_radius_m

    out = np.ones_like(x)
    mid = (x > bp1) & (x <= bp2)
    if np.any(mid):
        d_eq_sq = x[mid] ** t.path_loss_exponent / k  # slant^2 matching the BS power
        cos_eq = np.clip((a - d_eq_sq) / b, -1.0, 1.0)
        out[mid] = np.exp(-0.5 * g.satellite_count * (1.0 - cos_eq))
    out[x > bp2] = 0.0
    return out


def _serving_pdf_batch(cfg: SystemConfig, x: np.ndarray) -> np.ndarray:
    lam = cfg.terrestrial.bs_density
    a_t = association_prob_terrestrial(cfg)
    f_nearest = 2.0 * math.pi * lam * x * np.exp(-math.pi * lam * x * x)
    return f_nearest * _thinning(cfg, x) / a_t


def serving_distance_pdf_terrestrial(cfg: SystemConfig, x: float) -> float:
    """Density of the serving-BS distance given terrestrial association."""
    if x < 0.0:
        return 0.0
    return float(_serving_pdf_batch(cfg, np.array([float(x)]))[0])


def serving_distance_cdf_terrestrial(cfg: SystemConfig, x: float) -> float:
    """Piecewise CDF matching the three density branches; plateaus at the
    support end."""
    if x <= 0.0:
        return 0.0
    lam = cfg.terrestrial.bs_density
    if cfg.satellite.geom.satellite_count == 0:
        return -math.expm1(-math.pi * lam * x * x)
    bp1, bp2 = _breakpoints(cfg)
    a_t = association_prob_terrestrial(cfg)
    head = -math.expm1(-math.pi * lam * min(x, bp1) ** 2) / a_t
    if x <= bp1:
        return head
    est = integrate(
        lambda xs: _serving_pdf_batch(cfg, xs),
        bp1,
        min(x, bp2),
        cfg.analysis.quadrature,
        vectorized=True,
    )
    return min(head + est.value, 1.0)


def serving_angle_pdf_satellite(cfg: SystemConfig, x_s: float) -> float:
    """Density of the serving-satellite zenith angle given satellite
    association."""
    g = cfg.satellite.geom
    if not 0.0 <= x_s <= g.max_zenith_rad + 1e-12:
        raise ValueError(f"serving angle {x_s!r} outside [0, {g.max_zenith_rad!r}]")
    a_s = association_prob_satellite(cfg)
    if a_s == 0.0:
        return 0.0
    lam = cfg.terrestrial.bs_density
    x = _power_match_distance(cfg, x_s)
    return float(math.exp(-math.pi * lam * x * x) * _contact_pdf_arr(cfg, x_s) / a_s)


def _serving_angle_pdf_batch(cfg: SystemConfig, phi: np.ndarray) -> np.ndarray:
    lam = cfg.terrestrial.bs_density
    a_s = association_prob_satellite(cfg)
    x = _power_match_distance(cfg, phi)
    return np.exp(-math.pi * lam * x * x) * _contact_pdf_arr(cfg, phi) / a_s


# ---------------------------------------------------------------------------
# terrestrial interference Laplace transform and the coverage kernel


def laplace_interference_terrestrial(
    cfg: SystemConfig, s: float, x_t: float, order: int | None = None
) -> TruncatedSeries:
    """Taylor series (about s) of the interference Laplace transform
    exp(-pi lam x^2 [2F1(-2/eta, M; 1-2/eta; -s P x^-eta) - 1]).

    Coefficient 0 is the scalar transform value in (0, 1].  Successive
    z-derivatives of the hypergeometric factor come from the contiguous
    relation, so no numerical differentiation is involved.
    """
    if s < 0.0 or x_t <= 0.0:
        raise ValueError("need s >= 0 and x_t > 0")
    t = cfg.terrestrial
    k = t.mimo.serving_shape - 1 if order is None else order
    eta = t.path_loss_exponent
    a, b, c = -2.0 / eta, float(t.mimo.interferer_shape), 1.0 - 2.0 / eta
    dz_ds = -t.tx_power_w * x_t ** (-eta)
    z = dz_ds * s
    f_tab = gauss_2f1_shift_table(a, b, c, z, k + 1)
    pil = math.pi * t.bs_density * x_t * x_t
    coeffs = [-pil * (f_tab[0] - 1.0)]
    poch = 1.0
    for n in range(1, k + 1):
        poch *= (a + n - 1.0) * (b + n - 1.0) / ((c + n - 1.0) * n)
        coeffs.append(-pil * poch * dz_ds**n * f_tab[n])
    return TruncatedSeries(tuple(coeffs)).exp()


def _terrestrial_kernel_factory(cfg: SystemConfig, threshold: float):
    """Vectorized x -> sum_q term_q(x) of the Gamma-tail expansion at the
    given SINR threshold.

    At the expansion point s0 = thr x^eta / P the hypergeometric argument is
    -thr for every x, so the shifted-2F1 table is shared across nodes; the
    per-node work is assembling the rescaled exponent series and one
    exponential recurrence.
    """
    t = cfg.terrestrial
    m_serve = t.mimo.serving_shape
    eta = t.path_loss_exponent
    sigma2 = t.noise_w
    lam = t.bs_density
    a, b, c = -2.0 / eta, float(t.mimo.interferer_shape), 1.0 - 2.0 / eta

    # u_n = thr^n * 2F1(a+n, b+n; c+n; -thr); g_n = (a)_n (b)_n / ((c)_n n!)
    u = np.array(gauss_2f1_scaled_shift_table(a, b, c, -threshold, m_serve))
    g = np.ones(m_serve)
    for n in range(1, m_serve):
        g[n] = g[n - 1] * (a + n - 1.0) * (b + n - 1.0) / ((c + n - 1.0) * n)
    psi = g * u  # <= 0 for n >= 1: the rescaled exponent series is positive

    def kernel(x: np.ndarray) -> np.ndarray:
        s0 = threshold * x**eta / t.tx_power_w
        pil = math.pi * lam * x * x
        coeff = np.empty((x.size, m_serve))
        coeff[:, 0] = -s0 * sigma2 - pil * (u[0] - 1.0)
        if m_serve > 1:
            coeff[:, 1:] = -pil[:, None] * psi[None, 1:]
            coeff[:, 1] += s0 * sigma2
        terms = series_exp_batch(coeff)
        # compensated accumulation across the q-terms
        total = np.zeros(x.size)
        carry = np.zeros(x.size)
        for q in range(m_serve):
            y = terms[:, q] - carry
            t_new = total + y
            carry = (t_new - total) - y
            total = t_new
        if np.any(total < -1e-6) or np.any(total > 1.0 + 1e-6):
            worst = float(total[np.argmax(np.abs(total - 0.5))])
            raise NumericalError(
                f"coverage term sum left [0,1] by more than 1e-6 (got {worst!r})"
            )
        return np.clip(total, 0.0, 1.0)

    return kernel


def _coverage_terrestrial_estimate(
    cfg: SystemConfig, threshold: float, spec: QuadratureSpec | None = None
) -> Estimate:
    spec = spec or cfg.analysis.quadrature
    kernel = _terrestrial_kernel_factory(cfg, threshold)

    def integrand(x: np.ndarray) -> np.ndarray:
        return _serving_pdf_batch(cfg, x) * kernel(x)

    end = _support_end(cfg)
    points = [p for p in _breakpoints(cfg) if 0.0 < p < end] if cfg.satellite.geom.satellite_count else []
    return integrate(integrand, 0.0, end, spec, points=points, vectorized=True)


def coverage_conditional_terrestrial(cfg: SystemConfig, threshold: float) -> float:
    """P[SINR >= threshold | terrestrial association], threshold linear."""
    if threshold <= 0.0:
        raise ValueError("SINR threshold must be positive")
    return min(max(_coverage_terrestrial_estimate(cfg, threshold).value, 0.0), 1.0)


# ---------------------------------------------------------------------------
# satellite side


def mean_satellite_interference(cfg: SystemConfig, x_s: float) -> float:
    """Mean side-lobe interference power from satellites beyond angle x_s
    (Campbell sum over the visible cap)."""
    g = cfg.satellite.geom
    if not 0.0 <= x_s <= g.max_zenith_rad + 1e-12:
        raise ValueError(f"serving angle {x_s!r} outside [0, {g.max_zenith_rad!r}]")
    s = cfg.satellite
    lo = path_loss_constant(s.carrier_hz)

    def integrand(phi):
        return lo / _slant_sq(cfg, phi) * np.sin(phi)

    est = integrate(
        integrand, x_s, g.max_zenith_rad, cfg.analysis.quadrature, vectorized=True
    )
    return 0.5 * g.satellite_count * s.tx_power_w * s.side_lobe_gain * est.value


def _mean_interference_batch(cfg: SystemConfig, phi: np.ndarray) -> np.ndarray:
    # antiderivative of the Campbell integrand: log of the slant-range ratio
    g = cfg.satellite.geom
    s = cfg.satellite
    lo = path_loss_constant(s.carrier_hz)
    b = 2.0 * g.earth_radius_m * g.orbit_radius_m
    d2_max = _slant_sq(cfg, g.max_zenith_rad)
    cap_integral = lo / b * np.log(d2_max / _slant_sq(cfg, phi))
    return 0.5 * g.satellite_count * s.tx_power_w * s.side_lobe_gain * cap_integral


def _coverage_satellite_estimate(
    cfg: SystemConfig, threshold: float, spec: QuadratureSpec | None = None
) -> Estimate:
    spec = spec or cfg.analysis.quadrature
    s = cfg.satellite
    g = s.geom
    lo = path_loss_constant(s.carrier_hz)
    m = s.fading.nakagami_m

    def integrand(phi: np.ndarray) -> np.ndarray:
        gain = s.tx_power_w * s.main_lobe_gain * lo / _slant_sq(cfg, phi)
        y = threshold * (_mean_interference_batch(cfg, phi) + s.noise_w) / gain
        tail = _sp.gammaincc(m, m * y)
        return tail * _serving_angle_pdf_batch(cfg, phi)

    return integrate(integrand, 0.0, g.max_zenith_rad, spec, vectorized=True)


def coverage_conditional_satellite(cfg: SystemConfig, threshold: float) -> float:
    """P[SINR >= threshold | satellite association], with the interference
    replaced by its mean."""
    if threshold <= 0.0:
        raise ValueError("SINR threshold must be positive")
    if association_prob_satellite(cfg) == 0.0:
        return 0.0
    return min(max(_coverage_satellite_estimate(cfg, threshold).value, 0.0), 1.0)


# ---------------------------------------------------------------------------
# totals


def coverage_total(cfg: SystemConfig, threshold: float | None = None) -> CoverageBreakdown:
    """Tier-weighted total coverage at the given (or configured) threshold."""
    thr = cfg.analysis.sinr_threshold if threshold is None else float(threshold)
    a_s = association_prob_satellite(cfg)
    a_t = 1.0 - a_s
    p_t = coverage_conditional_terrestrial(cfg, thr) if a_t > 0.0 else 0.0
    p_s = coverage_conditional_satellite(cfg, thr) if a_s > 0.0 else 0.0
    return CoverageBreakdown(a_t, a_s, p_t, p_s, p_t * a_t + p_s * a_s)


def _rate_outer_spec(cfg: SystemConfig) -> QuadratureSpec:
    q = cfg.analysis.quadrature
    # the outer threshold integral rides on inner quadrature noise; a tighter
    # relative goal than ~10x the inner one cannot converge
    return QuadratureSpec(
        rel_tol=max(10.0 * q.rel_tol, 1e-7),
        abs_tol=q.abs_tol,
        max_subdivisions=q.max_subdivisions,
    )


def rate_terrestrial(cfg: SystemConfig) -> float:
    """Mean terrestrial-tier rate in bit/s: bandwidth-scaled integral of the
    conditional coverage over thresholds."""
    inner = cfg.analysis.quadrature

    def tail_prob(t: float) -> float:
        return _coverage_terrestrial_estimate(cfg, t, inner).value / (1.0 + t)

    # power=eta removes the (1-u)^(2/eta - 1) endpoint factor the coverage
    # tail (~ t^(-2/eta)) leaves under the plain t = u/(1-u) map
    est = integrate_semi_infinite(
        tail_prob, _rate_outer_spec(cfg), power=cfg.terrestrial.path_loss_exponent
    )
    return cfg.terrestrial.bandwidth_hz / LN2 * est.value


def rate_satellite(cfg: SystemConfig) -> float:
    """Mean satellite-tier rate in bit/s."""
    if association_prob_satellite(cfg) == 0.0:
        return 0.0
    inner = cfg.analysis.quadrature

    def tail_prob(t: float) -> float:
        return _coverage_satellite_estimate(cfg, t, inner).value / (1.0 + t)

    est = integrate_semi_infinite(tail_prob, _rate_outer_spec(cfg), power=2.0)
    return cfg.satellite.bandwidth_hz / LN2 * est.value


def rate_total(cfg: SystemConfig) -> RateBreakdown:
    a_s = association_prob_satellite(cfg)
    r_t = rate_terrestrial(cfg) if a_s < 1.0 else 0.0
    r_s = rate_satellite(cfg)
    return RateBreakdown(r_t, r_s, r_t * (1.0 - a_s) + r_s * a_s)
