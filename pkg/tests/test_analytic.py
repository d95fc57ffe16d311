"""Association, serving distributions, Laplace transforms, coverage, rate."""

import math
import random

import numpy as np
import pytest

from hybridnet import analytic
from hybridnet.config import SystemConfig, config_from_dict
from hybridnet.numerics import QuadratureSpec, TruncatedSeries, integrate

CFG = config_from_dict({})


def _cfg(**overrides) -> SystemConfig:
    doc = {}
    for section, vals in overrides.items():
        doc[section] = vals
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# association probabilities


def test_association_dense_terrestrial_limit():
    cfg = _cfg(terrestrial={"lambda_T": 1e-2})
    assert analytic.association_prob_satellite(cfg) < 1e-6


def test_association_no_terrestrial_limit():
    # vanishing BS density: A_S approaches the probability any satellite is
    # visible, i.e. the contact-angle law at the horizon
    cfg = _cfg(terrestrial={"lambda_T": 1e-30})
    geom = cfg.satellite.geom
    visible = 1.0 - math.exp(-0.5 * geom.satellite_count * (1.0 - geom.alpha))
    assert analytic.association_prob_satellite(cfg) == pytest.approx(visible, rel=1e-9)


def test_association_complement_over_random_configs():
    random.seed(31)
    for _ in range(50):
        cfg = _cfg(
            terrestrial={"lambda_T": 10 ** random.uniform(-9.5, -7.5),
                         "P_t_T_W": random.uniform(1.0, 100.0),
                         "eta": random.uniform(2.5, 5.0)},
            satellite={"N_S": random.randint(1, 1000),
                       "P_t_S_W": random.uniform(1.0, 100.0),
                       "h_S_m": random.uniform(4e5, 2e6)},
        )
        a_s = analytic.association_prob_satellite(cfg)
        a_t = analytic.association_prob_terrestrial(cfg)
        assert 0.0 <= a_s <= 1.0
        assert abs(a_s + a_t - 1.0) <= 1e-8


def test_association_scale_invariance():
    # multiplying both powers by the same factor leaves A_S unchanged
    base = analytic.association_prob_satellite(CFG)
    scaled_cfg = _cfg(terrestrial={"P_t_T_W": 40.0 * 7.0}, satellite={"P_t_S_W": 50.0 * 7.0})
    assert analytic.association_prob_satellite(scaled_cfg) == pytest.approx(base, abs=1e-10)


def test_association_zero_satellites():
    cfg = _cfg(satellite={"N_S": 0})
    assert analytic.association_prob_satellite(cfg) == 0.0
    assert analytic.association_prob_terrestrial(cfg) == 1.0


# ---------------------------------------------------------------------------
# serving distributions


def test_serving_distance_pdf_basics():
    assert analytic.serving_distance_pdf_terrestrial(CFG, 0.0) == 0.0
    assert analytic.serving_distance_pdf_terrestrial(CFG, -1.0) == 0.0
    bp1, bp2 = analytic._breakpoints(CFG)
    assert analytic.serving_distance_pdf_terrestrial(CFG, bp2 * 1.01) == 0.0
    assert analytic.serving_distance_pdf_terrestrial(CFG, 0.5 * bp1) > 0.0


def test_serving_distance_pdf_normalizes():
    bp1, bp2 = analytic._breakpoints(CFG)
    est = integrate(
        lambda x: analytic._serving_pdf_batch(CFG, x),
        0.0, bp2, CFG.analysis.quadrature, points=[bp1], vectorized=True,
    )
    assert est.value == pytest.approx(1.0, abs=1e-6)


def test_serving_distance_cdf_properties():
    bp1, bp2 = analytic._breakpoints(CFG)
    assert analytic.serving_distance_cdf_terrestrial(CFG, 0.0) == 0.0
    # plateau at the support end carries all the mass
    assert analytic.serving_distance_cdf_terrestrial(CFG, bp2) == pytest.approx(1.0, abs=1e-6)
    assert analytic.serving_distance_cdf_terrestrial(CFG, bp2 * 3.0) == pytest.approx(1.0, abs=1e-6)
    # numerical derivative of the CDF matches the PDF away from breakpoints
    for x in (0.4 * bp1, 1.7 * bp1, 0.8 * bp2):
        h = 0.5
        fd = (
            analytic.serving_distance_cdf_terrestrial(CFG, x + h)
            - analytic.serving_distance_cdf_terrestrial(CFG, x - h)
        ) / (2.0 * h)
        assert fd == pytest.approx(analytic.serving_distance_pdf_terrestrial(CFG, x), rel=1e-4)


def test_serving_distance_no_satellites_is_nearest_bs_law():
    cfg = _cfg(satellite={"N_S": 0})
    lam = cfg.terrestrial.bs_density
    for x in (500.0, 5e3, 20e3, 60e3):
        expected = 2.0 * math.pi * lam * x * math.exp(-math.pi * lam * x * x)
        assert analytic.serving_distance_pdf_terrestrial(cfg, x) == pytest.approx(expected, rel=1e-12)
        assert analytic.serving_distance_cdf_terrestrial(cfg, x) == pytest.approx(
            -math.expm1(-math.pi * lam * x * x), rel=1e-12
        )


def test_serving_angle_pdf():
    geom = CFG.satellite.geom
    assert analytic.serving_angle_pdf_satellite(CFG, 0.0) == 0.0
    with pytest.raises(ValueError):
        analytic.serving_angle_pdf_satellite(CFG, geom.max_zenith_rad + 0.05)
    est = integrate(
        lambda p: analytic._serving_angle_pdf_batch(CFG, p),
        0.0, geom.max_zenith_rad, CFG.analysis.quadrature, vectorized=True,
    )
    assert est.value == pytest.approx(1.0, abs=1e-6)


# ---------------------------------------------------------------------------
# interference transform


def test_laplace_trivial_points():
    series = analytic.laplace_interference_terrestrial(CFG, 0.0, 8000.0)
    assert series.order == CFG.terrestrial.mimo.serving_shape - 1
    assert series.coefficients[0] == pytest.approx(1.0, rel=1e-12)
    sparse = _cfg(terrestrial={"lambda_T": 1e-30})
    series = analytic.laplace_interference_terrestrial(sparse, 3.0e12, 8000.0)
    assert series.coefficients[0] == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(ValueError):
        analytic.laplace_interference_terrestrial(CFG, -1.0, 8000.0)


def test_laplace_against_pgfl_integral():
    # exp(-2 pi lam int_x^inf [1 - (1 + s P r^-eta)^-M] r dr) evaluated
    # numerically, M=1 and eta=4, plus the arctan closed form
    cfg = _cfg(mimo={"N_T": 32, "M": 1})
    lam = cfg.terrestrial.bs_density
    p = cfg.terrestrial.tx_power_w
    x = 9_000.0
    s = 2.0e13
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-20)

    def integrand(r):
        u = s * p * r**-4.0
        return u / (1.0 + u) * r  # == (1 - 1/(1+u)) r without cancellation

    exponent = -2.0 * math.pi * lam * integrate(integrand, x, 5e6, spec).value
    got = analytic.laplace_interference_terrestrial(cfg, s, x).coefficients[0]
    # the [x, 5e6] window loses the (tiny) tail beyond 5e6; fold it back in
    tail = -2.0 * math.pi * lam * math.sqrt(s * p) / 2.0 * math.atan(math.sqrt(s * p) / 5e6**2)
    assert got == pytest.approx(math.exp(exponent + tail), rel=1e-8)
    closed = math.exp(-math.pi * lam * math.sqrt(s * p) * math.atan(math.sqrt(s * p) / x**2))
    assert got == pytest.approx(closed, rel=1e-10)


def test_laplace_against_pgfl_integral_general_m():
    lam = CFG.terrestrial.bs_density
    p = CFG.terrestrial.tx_power_w
    m_i = CFG.terrestrial.mimo.interferer_shape
    x, s = 7_000.0, 5.0e12
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-20)

    def integrand(r):
        u = s * p * r**-4.0
        return -math.expm1(-m_i * math.log1p(u)) * r  # 1 - (1+u)^-M, stable for tiny u

    exponent = -2.0 * math.pi * lam * integrate(integrand, x, 8e6, spec).value
    # tail beyond the window: integrand ~ M s P r^-3, integral = M s P / (2 R^2)
    exponent -= 2.0 * math.pi * lam * m_i * s * p / (2.0 * 8e6**2)
    got = analytic.laplace_interference_terrestrial(CFG, s, x).coefficients[0]
    assert got == pytest.approx(math.exp(exponent), rel=1e-7)


def test_coverage_kernel_consistent_with_laplace_series():
    # dual route: the rescaled kernel against explicitly composing
    # exp(-s sigma^2) with the interference transform series
    thr = 2.0
    x = 6_500.0
    t = CFG.terrestrial
    k = t.mimo.serving_shape
    s0 = thr * x**t.path_loss_exponent / t.tx_power_w
    lap = analytic.laplace_interference_terrestrial(CFG, s0, x)
    noise = TruncatedSeries(
        tuple([-s0 * t.noise_w, -t.noise_w] + [0.0] * (k - 2))
    ).exp()
    product = lap * noise
    direct = sum(
        (-s0) ** q * c for q, c in enumerate(product.coefficients)
    )
    kernel = analytic._terrestrial_kernel_factory(CFG, thr)
    assert kernel(np.array([x]))[0] == pytest.approx(direct, rel=1e-9)


# ---------------------------------------------------------------------------
# mean satellite interference


def test_mean_interference_endpoints_and_linearity():
    geom = CFG.satellite.geom
    assert analytic.mean_satellite_interference(CFG, geom.max_zenith_rad) == pytest.approx(0.0, abs=1e-25)
    base = analytic.mean_satellite_interference(CFG, 0.05)
    doubled_cfg = _cfg(satellite={"G_S_dB": 5.0 + 10.0 * math.log10(2.0)})
    assert analytic.mean_satellite_interference(doubled_cfg, 0.05) == pytest.approx(2.0 * base, rel=1e-9)
    with pytest.raises(ValueError):
        analytic.mean_satellite_interference(CFG, -0.1)


def test_mean_interference_quadrature_matches_closed_form():
    for x in (0.0, 0.1, 0.3, CFG.satellite.geom.max_zenith_rad / 2.0):
        q = analytic.mean_satellite_interference(CFG, x)
        c = float(analytic._mean_interference_batch(CFG, np.array([x]))[0])
        assert q == pytest.approx(c, rel=1e-12)


def test_mean_interference_nonincreasing():
    grid = np.linspace(0.0, CFG.satellite.geom.max_zenith_rad, 50)
    vals = [analytic.mean_satellite_interference(CFG, x) for x in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# coverage


def test_coverage_threshold_limits():
    assert analytic.coverage_conditional_terrestrial(CFG, 1e-9) == pytest.approx(1.0, abs=1e-6)
    # the terrestrial tail decays like thr^(-2/eta) until the noise cutoff,
    # so "-> 0" needs a threshold beyond it
    assert analytic.coverage_conditional_terrestrial(CFG, 1e9) < 1e-4
    assert analytic.coverage_conditional_terrestrial(CFG, 1e14) < 1e-8
    assert analytic.coverage_conditional_satellite(CFG, 1e-9) == pytest.approx(1.0, abs=1e-6)
    assert analytic.coverage_conditional_satellite(CFG, 1e9) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        analytic.coverage_conditional_terrestrial(CFG, 0.0)


def test_satellite_coverage_huge_main_lobe():
    cfg = _cfg(satellite={"G_So_dB": 120.0})
    assert analytic.coverage_conditional_satellite(cfg, 1.0) == pytest.approx(1.0, abs=1e-4)


def test_conditional_coverages_monotone_in_threshold():
    grid = np.logspace(-1.5, 1.5, 30)
    terr = [analytic.coverage_conditional_terrestrial(CFG, g) for g in grid]
    sat = [analytic.coverage_conditional_satellite(CFG, g) for g in grid]
    assert all(a >= b - 1e-9 for a, b in zip(terr, terr[1:]))
    assert all(a >= b - 1e-9 for a, b in zip(sat, sat[1:]))


def test_coverage_total_assembly():
    cb = analytic.coverage_total(CFG, 2.0)
    assert cb.coverage_total == pytest.approx(
        cb.coverage_terrestrial * cb.association_terrestrial
        + cb.coverage_satellite * cb.association_satellite
    )
    assert cb.association_terrestrial + cb.association_satellite == pytest.approx(1.0)
    # default threshold comes from the analysis section
    assert analytic.coverage_total(CFG).coverage_total == pytest.approx(
        analytic.coverage_total(CFG, CFG.analysis.sinr_threshold).coverage_total
    )


def test_coverage_total_no_satellites():
    cfg = _cfg(satellite={"N_S": 0})
    cb = analytic.coverage_total(cfg, 1.0)
    assert cb.association_satellite == 0.0
    assert cb.coverage_satellite == 0.0
    assert cb.coverage_total == pytest.approx(cb.coverage_terrestrial)


def test_coverage_interior_maximum_in_constellation_size():
    lam = 1e-9
    vals = {}
    for n_s in (1, 141, 1000):
        cfg = _cfg(terrestrial={"lambda_T": lam}, satellite={"N_S": n_s})
        vals[n_s] = analytic.coverage_total(cfg, 1.0).coverage_total
    assert vals[141] > vals[1]
    assert vals[141] > vals[1000]


# ---------------------------------------------------------------------------
# rate


def test_rate_scales_linearly_with_bandwidth():
    r1 = analytic.rate_terrestrial(_cfg(satellite={"N_S": 0}))
    r2 = analytic.rate_terrestrial(_cfg(satellite={"N_S": 0}, terrestrial={"B_T_Hz": 100e6}))
    assert r2 == pytest.approx(2.0 * r1, rel=1e-9)


def test_rate_total_assembly():
    a_s = analytic.association_prob_satellite(CFG)
    rb = analytic.rate_total(CFG)
    assert rb.rate_total == pytest.approx(
        rb.rate_terrestrial * (1.0 - a_s) + rb.rate_satellite * a_s
    )
    assert rb.rate_terrestrial > 0.0 and rb.rate_satellite > 0.0


def test_rate_no_satellites():
    rb = analytic.rate_total(_cfg(satellite={"N_S": 0}))
    assert rb.rate_satellite == 0.0
    assert rb.rate_total == pytest.approx(rb.rate_terrestrial)


def test_rate_matches_trapezoid_of_coverage_curve():
    # independent route: trapezoid over the conditional-coverage curve in t
    cfg = _cfg(satellite={"N_S": 0}, terrestrial={"lambda_T": 1e-8})
    grid = np.concatenate([[1e-4], np.logspace(-3.5, 6.5, 140)])
    cov = np.array([analytic.coverage_conditional_terrestrial(cfg, t) for t in grid])
    integrand = cov / (1.0 + grid)
    trap = np.trapezoid(integrand, grid) + grid[0]  # head: coverage ~ 1 below t0
    rate_trap = cfg.terrestrial.bandwidth_hz / math.log(2.0) * trap
    assert analytic.rate_terrestrial(cfg) == pytest.approx(rate_trap, rel=2e-2)
