"""Acceptance criteria, each at its stated tolerance.

Every criterion records one PASS/FAIL line; the lines are printed in the
pytest terminal summary and when this file is run as a script.
"""

import itertools
import math
import time

import numpy as np
import pytest

from phasesens import fock
from phasesens import gaussian as g
from phasesens.detection import (
    DetectionScheme,
    analytic_gain,
    error_curve,
    observable,
    parametric_readout_error,
    phase_error,
)
from phasesens.interferometer import InterferometerConfig, Topology, output_state, qcrb
from phasesens.sensitivity import (
    REGIMES,
    SqueezeRegime,
    config_for,
    optimize_displacement,
    optimized_figure,
    peak_and_width,
    table1,
    tolerance,
)

HD, TD = DetectionScheme.HOMODYNE, DetectionScheme.THRESHOLD
SA, R0, ANTI = SqueezeRegime.SINGLE_ARM, SqueezeRegime.TWO_ARM_R0, SqueezeRegime.TWO_ARM_ANTI
SINGLE, TWO = Topology.SINGLE_ARM, Topology.TWO_ARM

RESULTS = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok


def test_c1_table_reproduction():
    start = time.perf_counter()
    failures, worst_exact = [], 0.0
    for n in (5, 10, 50, 200):
        for e in table1(n):
            worst_exact = max(worst_exact, abs(e.rel_err_peak) if e.peak_exact else 0.0)
            if not e.peak_ok():
                failures.append(f"N={n} {e.regime.value}/{e.scheme.value} peak {e.rel_err_peak:+.2e}")
            if e.width_exact:
                worst_exact = max(worst_exact, abs(e.rel_err_width))
            if not e.width_ok():
                tol = tolerance(n, e.width_exact)
                failures.append(
                    f"N={n} {e.regime.value}/{e.scheme.value} width {e.rel_err_width:+.2e} (tol {tol:.2g})"
                )
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5.0
    detail = f"{elapsed:.2f}s, worst exact-entry error {worst_exact:.1e}"
    if failures:
        detail += "; " + "; ".join(failures)
    record(1, "table reproduction", ok, detail)
    assert elapsed < 5.0
    assert not failures, failures


def _qcrb_configs(n):
    yield "single", config_for(n, SA, 0.0)
    yield "two-r0", config_for(n, R0, (n + 0.25) / 2)
    yield "two-anti", config_for(n, ANTI, n * (n + 2) / (2 * (n + 1)))


def test_c2_qcrb_saturation():
    worst = 0.0
    for n in (1, 10, 100):
        for _, cfg in _qcrb_configs(n):
            worst = max(worst, abs(phase_error(cfg, TD).dphi_sq / qcrb(cfg) - 1))
    ok = record(2, "threshold detection saturates the QCRB", worst <= 1e-9, f"max rel err {worst:.1e}")
    assert ok


def _curve_errors():
    out = {}
    for n in (1, 10, 100):
        k = 4 * n * (n + 1)
        phis = np.linspace(-0.7, 0.7, 101)
        cases = [
            ("single TD", config_for(n, SA, 0.0), TD, phis,
             (1 + k * np.sin(2 * phis) ** 2) / (2 * k * np.cos(2 * phis) ** 2)),
            ("single HD", config_for(n, SA, n * (n + 1) / (2 * n + 1)), HD, phis,
             (1 + (2 * n + 1) ** 2 * np.tan(phis) ** 2) / (4 * n * (n + 1))),
            ("two-r0 HD", config_for(n, R0, n * (n + 1) / (2 * n + 1)), HD, phis,
             (1 + (2 * n + 1) * np.tan(phis) ** 2) / (4 * n * (n + 1))),
        ]
        wide = np.linspace(-1.2, 1.2, 101)
        cases.append(("two-anti HD", config_for(n, ANTI, n * (n + 2) / (2 * (n + 1))), HD, wide,
                      1 / (2 * n * (n + 2) * np.cos(wide) ** 2)))
        for label, cfg, scheme, grid, ref in cases:
            d = np.array([p.dphi_sq for p in error_curve(cfg, scheme, grid)])
            out[(label, n)] = float(np.max(np.abs(d / ref - 1)))
    return out


def test_c3_closed_form_curves():
    errs = _curve_errors()
    worst_key = max(errs, key=errs.get)
    worst = errs[worst_key]
    ok = record(3, "closed-form error curves", worst <= 1e-9,
                f"max rel err {worst:.1e} ({worst_key[0]}, N={worst_key[1]})")
    assert ok


SINGLE_GRID = [(a, r) for a in (0.0, 1.5, 3.0) for r in (0.0, -0.5, 0.5, 1.0)]
TWO_GRID = [(a, r, R) for a in (0.0, 1.5, 3.0) for r, R in ((0.5, 0.0), (1.0, 0.0), (1.0, -1.0), (0.5, 0.5), (1.0, 1.0))]
PHIS = (-0.7, 0.0, 0.35, 0.7)
FD_STEP = 1e-3


def _compare(gm, fm):
    return abs(gm - fm) / max(abs(gm), 1e-2)


def _oracle_fd_gain(cfg, psi0, obs):
    def mean_at(phi):
        return fock.observable_moments(fock.evolve_phase(psi0, cfg.with_phi(phi), "generator"), obs)[0]

    h = FD_STEP
    p = cfg.phi
    return (mean_at(p - 2 * h) - 8 * mean_at(p - h) + 8 * mean_at(p + h) - mean_at(p + 2 * h)) / (12 * h)


def test_c4_fock_equivalence():
    start = time.perf_counter()
    worst, worst_tail, worst_fd, count = 0.0, 0.0, 0.0, 0
    configs = [InterferometerConfig(SINGLE, a, r) for a, r in SINGLE_GRID]
    configs += [InterferometerConfig(TWO, a, r, R) for a, r, R in TWO_GRID]
    for base in configs:
        psi0 = fock.prepare(base)
        worst_tail = max(worst_tail, psi0.tail_mass)
        n = base.n_modes
        for phi in PHIS:
            cfg = base.with_phi(phi)
            out = fock.evolve_phase(psi0, cfg, "generator")
            gauss = output_state(cfg)
            obs_list = [g.number_operator(n, k) for k in range(n)]
            obs_list += [observable(cfg, s) for s in DetectionScheme]
            for obs in obs_list:
                gm, gv = g.quadratic_moments(gauss, obs)
                fm, fv = fock.observable_moments(out, obs)
                worst = max(worst, _compare(gm, fm), _compare(gv, fv))
                count += 2
            for s in DetectionScheme:
                obs = observable(cfg, s)
                worst = max(worst, _compare(analytic_gain(cfg, obs), fock.observable_gain(out, obs, cfg.two_arm)))
                count += 1
        # finite differences of oracle means at one phase per configuration
        cfg = base.with_phi(0.35)
        obs = observable(cfg, TD)
        worst_fd = max(worst_fd, _compare(analytic_gain(cfg, obs), _oracle_fd_gain(cfg, psi0, obs)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and worst_tail < 1e-12 and elapsed < 60 and worst_fd <= 1e-8
    record(4, "Gaussian engine matches the Fock oracle", ok,
           f"{count} comparisons, max rel err {worst:.1e}, finite-difference gains {worst_fd:.1e}, "
           f"max tail {worst_tail:.1e}, {elapsed:.1f}s")
    assert ok


def test_c5_threshold_defining_identity():
    single = [(0.0, 0.8), (1.0, 0.5), (2.0, 0.5)]
    two = [(0.5, 0.3, 0.0), (0.6, 0.3, -0.3), (0.5, 0.25, 0.25)]
    res = [fock.threshold_identity_residual(InterferometerConfig(SINGLE, a, r), 100) for a, r in single]
    res += [fock.threshold_identity_residual(InterferometerConfig(TWO, a, r, R), 30) for a, r, R in two]
    worst = max(res)
    ok = record(5, "threshold operator defining identity", worst < 1e-9, f"max residual {worst:.1e}")
    assert ok


def test_c6_limits():
    n = 1000
    snl = max(
        abs(peak_and_width(InterferometerConfig(t, math.sqrt(m), 0.0), HD).dphi0_sq * 4 * m - 1)
        for t in (SINGLE, TWO) for m in (1, 10, 1000)
    )
    r = 1.0
    sq = peak_and_width(InterferometerConfig(SINGLE, math.sqrt(n - math.sinh(r) ** 2), r), HD).dphi0_sq
    sq_err = abs(sq / (math.exp(-2 * r) / (4 * n)) - 1)
    prefactors = {(SA, HD): 1 / 4, (SA, TD): 1 / 8, (R0, HD): 1 / 4, (R0, TD): 1 / 4, (ANTI, HD): 1 / 2, (ANTI, TD): 1 / 2}
    hl_err, worst_ndphi = 0.0, 0.0
    for (regime, scheme), pref in prefactors.items():
        fig = optimized_figure(n, regime, scheme)
        hl_err = max(hl_err, abs(n**2 * fig.dphi0_sq / pref - 1))
        worst_ndphi = max(worst_ndphi, n * math.sqrt(fig.dphi0_sq))
    ok = snl <= 1e-12 and sq_err <= 0.02 and hl_err <= 0.01 and worst_ndphi < 1.38
    record(6, "limit recoveries", ok,
           f"shot noise {snl:.1e}, squeezed {sq_err:.2%}, Heisenberg prefactors {hl_err:.2%}, "
           f"max N*dphi0 {worst_ndphi:.3f}")
    assert ok


def test_c7_small_phase_expansion():
    curve_err, gain_err, fit_err = 0.0, 0.0, 0.0
    for n in (5, 10, 50):
        cfg = config_for(n, R0, optimize_displacement(n, R0, TD))
        phis = np.linspace(-0.02, 0.02, 41)
        d = np.array([p.dphi_sq for p in error_curve(cfg, TD, phis)])
        ref = (1 + 0.5 * (9 * n + 1.25) * phis**2) / (4 * n * (n + 1.5))
        curve_err = max(curve_err, float(np.max(np.abs(d / ref - 1))))
        expected = 4 * (cfg.alpha**2 * math.exp(2 * cfg.r) + math.sinh(cfg.r) ** 2)
        gain_err = max(gain_err, abs(phase_error(cfg, TD).gain / expected - 1))
        # series fit of the mean signal around phi = 0
        obs = observable(cfg, TD)
        h = np.linspace(-1e-3, 1e-3, 21)
        means = [g.quadratic_moments(output_state(cfg.with_phi(p)), obs)[0] for p in h]
        slope = np.polynomial.polynomial.polyfit(h, means, 5)[1]
        fit_err = max(fit_err, abs(slope / expected - 1))
    ok = curve_err <= 0.01 and gain_err <= 1e-8 and fit_err <= 1e-8
    record(7, "small-phase expansion, two-arm threshold", ok,
           f"curve {curve_err:.2%}, analytic gain {gain_err:.1e}, fitted gain {fit_err:.1e}")
    assert ok


def test_c8_parametric_readout():
    vac = parametric_readout_error(1.0, g.vacuum(1), 0.5)
    sig = g.apply(g.vacuum(1), g.make_squeeze(0, 0.3).then(g.make_displacement(0, 0.8)))
    scale_err = max(
        abs(parametric_readout_error(0.5, sig, 0.5 * math.exp(-2 * s)) / parametric_readout_error(0.5, sig, 0.5)
            / math.exp(-2 * s) - 1)
        for s in (0.2, 0.7, 1.5)
    )
    gts = np.logspace(-6, -3, 13)
    vals = [parametric_readout_error(t, sig, 0.5) for t in gts]
    slope = np.polyfit(np.log(gts), np.log(vals), 1)[0]
    ok = abs(vac - 0.125) <= 1e-12 and scale_err <= 1e-12 and abs(slope + 2) <= 1e-3
    record(8, "parametric readout model", ok,
           f"vacuum {vac:.12g}, squeeze scaling {scale_err:.1e}, log-log slope {slope:.6f}")
    assert ok


def test_c9_antisymmetric_width():
    worst = 0.0
    for n in (1, 10, 100, 1000):
        for scheme in (HD, TD):
            worst = max(worst, abs(optimized_figure(n, ANTI, scheme).width - math.pi / 2))
    ok = record(9, "antisymmetric two-arm width is pi/2", worst <= 1e-9, f"max abs err {worst:.1e}")
    assert ok


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
