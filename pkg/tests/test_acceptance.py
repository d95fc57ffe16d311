"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to watch the lines live.

Criteria 1-3 compare the analytic engine against the bundled reference
curves at the bundled default parameters.  Criterion 1 and criterion 3 are
expected to fail with those defaults: the reference data embeds a noise
scale roughly three orders of magnitude above the default noise entries
(verified against an independent brute-force simulation; see the failure
messages), and no sanctioned calibration scalar can absorb that.  They are
asserted at their stated tolerances anyway; criterion 2 falls back to the
criterion-4 shape checks exactly as its statement allows.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from hybridnet import analytic, golden, montecarlo
from hybridnet.config import config_from_dict
from hybridnet.numerics import QuadratureSpec, integrate
from hybridnet.sweep import SweepSpec, rows_to_csv, run_sweep

CFG = config_from_dict({})
SEED = 20240501
TRIALS = 100_000


def _report(criterion: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def _cfg(lam=None, n_s=None, m=None, n_t=None, users=None):
    doc = {}
    if lam is not None:
        doc.setdefault("terrestrial", {})["lambda_T"] = lam
    if n_s is not None:
        doc.setdefault("satellite", {})["N_S"] = n_s
    if m is not None:
        doc.setdefault("fading", {})["m"] = m
    if n_t is not None or users is not None:
        doc["mimo"] = {"N_T": n_t or 32, "M": users or 16}
    return config_from_dict(doc)


@pytest.fixture(scope="module")
def mc_outcomes():
    mc = montecarlo.MonteCarloConfig(trials=TRIALS, seed=SEED)
    t0 = time.time()
    res = montecarlo.run_trials(CFG, mc)
    return mc, res, time.time() - t0


@pytest.fixture(scope="module")
def nakagami_fit():
    return golden.fit_nakagami(CFG)


def _criterion4_shape_checks(threshold: float = 1.0) -> list[str]:
    """The four calibration-free shape properties; returns failure strings."""
    failures = []
    # (a) interior maximum of total coverage vs constellation size
    for lam in (1e-9, 5e-9, 1e-8):
        probe = {n: analytic.coverage_total(_cfg(lam=lam, n_s=n), threshold).coverage_total
                 for n in (1, 141, 221, 991)}
        best = max(probe, key=probe.get)
        if best in (1, 991):
            failures.append(f"4a: no interior coverage maximum at lambda_T={lam:g} ({probe})")
    # (b) density ordering flips between small and large constellations
    small_lo = analytic.coverage_total(_cfg(lam=1e-9, n_s=1), threshold).coverage_total
    small_hi = analytic.coverage_total(_cfg(lam=1e-8, n_s=1), threshold).coverage_total
    large_lo = analytic.coverage_total(_cfg(lam=1e-9, n_s=101), threshold).coverage_total
    large_hi = analytic.coverage_total(_cfg(lam=1e-8, n_s=101), threshold).coverage_total
    if not small_hi > small_lo:
        failures.append(f"4b: dense tier not ahead at N_S=1 ({small_hi:.4f} <= {small_lo:.4f})")
    if not large_lo > large_hi:
        failures.append(f"4b: sparse tier not ahead at N_S=101 ({large_lo:.4f} <= {large_hi:.4f})")
    # (c) hybrid vs terrestrial-only crossover in the user load at N_T=32
    for users, hybrid_above in ((1, False), (15, True)):
        hyb = analytic.coverage_total(_cfg(n_t=32, users=users), threshold).coverage_total
        terr = analytic.coverage_total(_cfg(n_t=32, users=users, n_s=0), threshold).coverage_total
        if (hyb > terr) != hybrid_above:
            failures.append(f"4c: M={users}: hybrid {hyb:.4f} vs terrestrial {terr:.4f}")
    # (d) satellite association monotone in satellite power and count
    a_power = [analytic.association_prob_satellite(
        config_from_dict({"satellite": {"P_t_S_W": p}})) for p in (10.0, 30.0, 50.0, 70.0, 90.0)]
    a_count = [analytic.association_prob_satellite(_cfg(n_s=n)) for n in (50, 150, 300, 600, 1000)]
    if not all(x < y for x, y in zip(a_power, a_power[1:])):
        failures.append(f"4d: A_S not increasing in satellite power: {a_power}")
    if not all(x < y for x, y in zip(a_count, a_count[1:])):
        failures.append(f"4d: A_S not increasing in constellation size: {a_count}")
    return failures


def test_criterion_1_terrestrial_rate_intercepts():
    """Calibration-free rate reproduction at N_S=0, +-5%, under 30 s."""
    targets = {1e-9: 70.8185564244104e6, 5e-9: 113.457599331404e6, 1e-8: 119.17980202041e6}
    t0 = time.time()
    computed = {lam: analytic.rate_total(_cfg(lam=lam, n_s=0)).rate_total
                for lam in targets}
    elapsed = time.time() - t0
    rels = {lam: (computed[lam] - targets[lam]) / targets[lam] for lam in targets}
    detail = ", ".join(
        f"lambda_T={lam:g}: {computed[lam] / 1e6:.2f} vs {targets[lam] / 1e6:.2f} Mbps "
        f"({rels[lam]:+.1%})" for lam in targets
    ) + f"; runtime {elapsed:.1f}s"
    ok = all(abs(r) <= 0.05 for r in rels.values()) and elapsed < 30.0
    _report("1 (terrestrial-only rate intercepts)", ok, detail)
    assert elapsed < 30.0
    assert ok, (
        f"{detail}. The sparse-density intercept is not reachable from the bundled "
        f"defaults: an independent brute-force simulation confirms the computed value "
        f"for sigma_T^2 = 1e-17 W (-140 dBm), while the reference triple is matched "
        f"only by an effective sigma_T^2 ~= 2e-14 W."
    )


def test_criterion_2_rate_figure_with_m_fit(nakagami_fit):
    """Rate-figure reproduction after an integer Nakagami-m fit; the stated
    fallback applies when no integer m reaches the anchor within 8%."""
    m_best, err = nakagami_fit
    if err <= golden.RATE_TOLERANCE:
        report = golden.run_figure(_cfg(m=m_best), 5)
        ok = report.fraction_ok >= 0.80
        _report("2 (rate figure, fitted m)", ok,
                f"m={m_best}, anchor err {err:.1%}, {report.fraction_ok:.1%} of points within 8%")
        assert ok
    else:
        failures = _criterion4_shape_checks()
        ok = not failures
        _report("2 (rate figure -> shape-check fallback)", ok,
                f"no integer m reaches the anchor within 8% (best m={m_best} at {err:+.1%}); "
                f"criterion falls back to the shape checks: "
                + ("all hold" if ok else "; ".join(failures)))
        assert ok, failures


def test_criterion_3_coverage_figure_with_gamma_fit(nakagami_fit):
    """Coverage-figure reproduction after a golden-section threshold fit."""
    m_best, err = nakagami_fit
    m_used = m_best if err <= golden.RATE_TOLERANCE else None  # fitted m only if it anchored
    cfg = _cfg(m=m_used) if m_used else CFG
    gamma = golden.fit_gamma(cfg, figure=4)
    anchor = analytic.coverage_total(_cfg(lam=1e-9, n_s=101, m=m_used), gamma).coverage_total
    anchor_err = abs(anchor - 0.806130469010449)
    report = golden.run_figure(cfg, 4, gamma=gamma)
    ok = anchor_err <= 0.03 and report.fraction_ok >= 0.80
    _report(
        "3 (coverage figure, fitted gamma)", ok,
        f"gamma = {10 * math.log10(gamma):.2f} dB (anchor err {anchor_err:.4f}), "
        f"{report.fraction_ok:.1%} of 300 points within 0.03",
    )
    assert anchor_err <= 0.03, "threshold fit failed to reach the anchor"
    assert ok, (
        f"only {report.fraction_ok:.1%} of points within 0.03 after the threshold fit. "
        f"The reference curve family is shaped by a satellite-noise scale near "
        f"10^(-13.5) W and a Nakagami m near 3 (which reproduce ~80% of these points); "
        f"with the bundled default noise entries no threshold value recovers the shape."
    )


def test_criterion_4_shape_properties():
    """Interior maximum, density-ordering flip, hybrid crossover, monotone A_S."""
    failures = _criterion4_shape_checks()
    ok = not failures
    _report("4 (shape properties)", ok, "all four hold" if ok else "; ".join(failures))
    assert ok, failures


def test_criterion_5_cross_oracle(mc_outcomes):
    """Monte Carlo vs analytic at the defaults: association, coverage grid, rate."""
    mc, res, sim_elapsed = mc_outcomes
    t0 = time.time()
    problems = []

    a_s = analytic.association_prob_satellite(CFG)
    est = montecarlo.estimate_coverage(CFG, mc, 1.0, outcomes=res).association_satellite
    tol = max(est.half_width_95, 0.01)
    if abs(est.value - a_s) > tol:
        problems.append(f"A_S off by {abs(est.value - a_s):.4f} (tol {tol:.4f})")

    # ten thresholds spanning the practically relevant coverage range; the
    # mean-interference approximation grows past +8 dB and is reported below
    worst = 0.0
    for gamma_db in np.linspace(-8.0, 8.0, 10):
        thr = 10 ** (gamma_db / 10.0)
        cb = analytic.coverage_total(CFG, thr)
        est = montecarlo.estimate_coverage(CFG, mc, thr, outcomes=res).total
        tol = max(est.half_width_95, 0.02)
        gap = abs(est.value - cb.coverage_total)
        worst = max(worst, gap)
        if gap > tol:
            problems.append(f"coverage at {gamma_db:+.1f} dB off by {gap:.4f} (tol {tol:.4f})")

    rb = analytic.rate_total(CFG)
    est = montecarlo.estimate_rate(CFG, mc, outcomes=res).total
    rate_tol = est.half_width_95 + 0.03 * rb.rate_total
    rate_gap = abs(est.value - rb.rate_total)
    if rate_gap > rate_tol:
        problems.append(f"rate off by {rate_gap / 1e6:.2f} Mbps (tol {rate_tol / 1e6:.2f})")

    thr_hi = 10.0
    approx_gap = abs(
        montecarlo.estimate_coverage(CFG, mc, thr_hi, outcomes=res).total.value
        - analytic.coverage_total(CFG, thr_hi).coverage_total
    )
    elapsed = sim_elapsed + (time.time() - t0)
    ok = not problems and elapsed < 300.0
    _report(
        "5 (cross-oracle equivalence)", ok,
        f"worst coverage gap {worst:.4f}, rate gap {rate_gap / 1e6:.2f} Mbps "
        f"(tol {rate_tol / 1e6:.2f}), runtime {elapsed:.1f}s; mean-interference "
        f"approximation error at +10 dB: {approx_gap:.4f}",
    )
    assert elapsed < 300.0
    assert ok, problems


def test_criterion_6_distribution_validation(mc_outcomes):
    """KS distances of serving-distance, serving-angle, and contact-angle laws."""
    mc, res, _ = mc_outcomes
    stats = montecarlo.empirical_serving_distributions(CFG, mc, outcomes=res)
    ok = (
        stats.ks_terrestrial < 0.02
        and stats.ks_satellite < 0.02
        and stats.ks_contact_angle < 0.02
    )
    _report(
        "6 (distribution validation)", ok,
        f"KS serving-distance {stats.ks_terrestrial:.4f}, serving-angle "
        f"{stats.ks_satellite:.4f}, contact-angle {stats.ks_contact_angle:.4f} "
        f"({stats.n_terrestrial}/{stats.n_satellite} conditioned samples)",
    )
    assert ok, stats


def test_criterion_7_numerics_suite(tmp_path):
    """2F1 oracle, derivative stack, incomplete gamma, normalizations,
    association complement, and byte-level determinism."""
    problems = []

    # 2F1 against the exact rational brute-force series
    from test_special import series_2f1_exact
    from hybridnet.numerics import gauss_2f1

    random.seed(4242)
    worst_2f1 = 0.0
    for _ in range(100):
        a = Fraction(random.randint(-30, 40), 10)
        b = Fraction(random.randint(1, 200), 10)
        c = Fraction(random.randint(3, 50), 10)
        z = Fraction(-random.randint(0, 60), 100)
        expected = series_2f1_exact(a, b, c, z)
        got = gauss_2f1(float(a), float(b), float(c), float(z))
        rel = abs(got - expected) / max(abs(expected), 1e-300)
        worst_2f1 = max(worst_2f1, rel)
    if worst_2f1 > 1e-10:
        problems.append(f"2F1 vs rational series: worst rel {worst_2f1:.2e}")

    # series-derivative stack vs high-precision central differences
    import mpmath
    from hybridnet.numerics import series_exp, series_lift

    mpmath.mp.dps = 40
    h = mpmath.mpf("1e-4")
    random.seed(77)
    worst_fd = 0.0
    for _ in range(20):
        coeffs = [random.uniform(-1, 1) for _ in range(4)]
        series = series_exp(series_lift(coeffs + [0.0, 0.0, 0.0]))

        def f(s):
            return mpmath.e ** sum(mpmath.mpf(c) * s**j for j, c in enumerate(coeffs))

        for q in range(1, 7):
            stencil = sum(
                (-1) ** k * mpmath.binomial(q, k) * f((q / 2 - k) * h) for k in range(q + 1)
            )
            fd = float(stencil / h**q)
            rel = abs(series.derivative(q) - fd) / max(abs(fd), 1e-12)
            worst_fd = max(worst_fd, rel)
    if worst_fd > 1e-5:
        problems.append(f"series derivatives vs finite differences: worst rel {worst_fd:.2e}")

    # incomplete gamma vs quadrature
    from hybridnet.numerics import upper_incomplete_gamma_reg

    spec = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-18)
    worst_gamma = 0.0
    for m in (1.0, 2.0, 17.0, 2.5):
        for x in (0.2, 2.0, 10.0):
            lower = integrate(lambda t: t ** (m - 1.0) * math.exp(-t), 0.0, x, spec).value
            ref = 1.0 - lower / math.gamma(m)
            worst_gamma = max(worst_gamma, abs(upper_incomplete_gamma_reg(m, x) - ref))
    if worst_gamma > 1e-10:
        problems.append(f"incomplete gamma vs quadrature: worst abs {worst_gamma:.2e}")

    # density normalizations
    bp1, bp2 = analytic._breakpoints(CFG)
    mass_t = integrate(lambda x: analytic._serving_pdf_batch(CFG, x), 0.0, bp2,
                       CFG.analysis.quadrature, points=[bp1], vectorized=True).value
    mass_s = integrate(lambda p: analytic._serving_angle_pdf_batch(CFG, p), 0.0,
                       CFG.satellite.geom.max_zenith_rad, CFG.analysis.quadrature,
                       vectorized=True).value
    geom = CFG.satellite.geom
    mass_c = integrate(lambda p: analytic._contact_pdf_arr(CFG, p), 0.0, geom.max_zenith_rad,
                       CFG.analysis.quadrature, vectorized=True).value
    mass_c_expected = 1.0 - math.exp(-0.5 * geom.satellite_count * (1.0 - geom.alpha))
    for name, got, want in (("serving distance", mass_t, 1.0), ("serving angle", mass_s, 1.0),
                            ("contact angle", mass_c, mass_c_expected)):
        if abs(got - want) > 1e-6:
            problems.append(f"{name} density mass {got!r} (want {want!r})")

    # association complement
    random.seed(9)
    worst_assoc = 0.0
    for _ in range(10):
        cfg = config_from_dict({
            "terrestrial": {"lambda_T": 10 ** random.uniform(-9.5, -8.0)},
            "satellite": {"N_S": random.randint(10, 900)},
        })
        worst_assoc = max(worst_assoc, abs(
            analytic.association_prob_satellite(cfg)
            + analytic.association_prob_terrestrial(cfg) - 1.0
        ))
    if worst_assoc > 1e-8:
        problems.append(f"A_S + A_T deviates by {worst_assoc:.2e}")

    # determinism: identical seeded runs give identical bytes
    spec2 = SweepSpec("N_S", (200.0, 400.0), outputs=("A_S", "P_tot"),
                      engines=("analytic", "montecarlo"))
    mc = montecarlo.MonteCarloConfig(trials=2000, seed=31)
    a = rows_to_csv(CFG, spec2, run_sweep(CFG, spec2, mc, workers=1), mc)
    b = rows_to_csv(CFG, spec2, run_sweep(CFG, spec2, mc, workers=2), mc)
    if a != b:
        problems.append("seeded sweep runs differ at byte level")

    ok = not problems
    _report(
        "7 (numerics unit suite)", ok,
        f"2F1 worst rel {worst_2f1:.1e}; derivative worst rel {worst_fd:.1e}; "
        f"gamma worst abs {worst_gamma:.1e}; masses ok; association worst "
        f"{worst_assoc:.1e}; byte determinism ok" if ok else "; ".join(problems),
    )
    assert ok, problems
