"""Acceptance suite: one test per shipped criterion, at its stated tolerance.

Each test prints a PASS/FAIL line (visible with ``pytest -s``) before
asserting, so a full run yields one line per criterion.
"""

import json
import math
import time

import numpy as np
import pytest

from relotto import (
    DriveProtocol,
    bounds_report,
    cycle_quantities,
    doppler_factor,
    emw_adiabatic,
    eta_ss_mw,
    high_t_convergence,
    lambda_from_trajectory,
    maximize_scalar,
    mean_photon_moving,
    rezek_kosloff,
    solid_angle_average_inverse_doppler,
    solve_husimi,
    w_adiabatic_high_t,
    w_ss_high_t,
)
from relotto.cli import main

TAU_GRID = [0.1 * i for i in range(1, 10)]
V_GRID = [0.1 * i for i in range(10)] + [0.95]


def report(num, desc, ok):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} — {desc}")
    assert ok, f"criterion {num}: {desc}"


def best_time(fn, repeats=7):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_cli_json(capsys, argv):
    code = main(argv)
    doc = json.loads(capsys.readouterr().out)
    return code, doc


def test_criterion_01_generalized_carnot_anchor(capsys):
    code, doc = run_cli_json(capsys, ["bounds", "--tau", "0.5", "--v", "0.85"])
    value = doc["result"]["eta_gen_carnot"]
    elapsed = best_time(lambda: bounds_report(0.5, 0.85))
    ok = code == 0 and abs(value - 0.6108) <= 0.002 and elapsed < 1e-3
    report(1, f"eta_gen_carnot = {value:.6f} (0.6108 +/- 0.002), "
              f"runtime {elapsed * 1e6:.0f} us", ok)


def test_criterion_02_sudden_upper_anchor(capsys):
    code, doc = run_cli_json(capsys, ["bounds", "--tau", "0.25", "--v", "0.9"])
    value = doc["result"]["eta_ss_upper"]
    elapsed = best_time(lambda: bounds_report(0.25, 0.9))
    ok = code == 0 and abs(value - 0.24369) <= 1e-4 and elapsed < 1e-3
    report(2, f"eta_ss_upper = {value:.6f} (0.24369 +/- 1e-4), "
              f"runtime {elapsed * 1e6:.0f} us", ok)


def test_criterion_03_histogram_reproduction(tmp_path, capsys):
    out = tmp_path / "fig5.csv"
    t0 = time.perf_counter()
    code = main(["hist", "--preset", "fig5", "--output", str(out)])
    elapsed = time.perf_counter() - t0
    manifest = json.loads((tmp_path / "fig5.manifest.json").read_text())
    gap = manifest["bound"] - manifest["max_eta"]
    ok = (code == 0 and elapsed < 60.0 and manifest["violations"] == 0
          and manifest["config"]["count"] == 1_000_000 and 0.0 < gap <= 0.02)
    report(3, f"10^6 samples in {elapsed:.1f} s, violations = "
              f"{manifest['violations']}, bound gap {gap:.2e}", ok)


def test_criterion_04_scatter_reproduction(tmp_path, capsys):
    out = tmp_path / "fig3.csv"
    code = main(["scatter", "--preset", "fig3", "--output", str(out)])
    manifest = json.loads((tmp_path / "fig3.manifest.json").read_text())
    out0 = tmp_path / "fig3_v0.csv"
    code0 = main(["scatter", "--preset", "fig3", "--v", "0", "--output", str(out0)])
    manifest0 = json.loads((tmp_path / "fig3_v0.manifest.json").read_text())
    ok = (code == 0 and code0 == 0
          and manifest["violations"] == 0
          and abs(manifest["bound"] - 0.6108) <= 0.002
          and manifest["config"]["count"] == 100_000
          and manifest0["violations"] == 0
          and manifest0["bound"] == pytest.approx(0.5, rel=1e-12))
    report(4, f"anchored run: {manifest['violations']} violations of "
              f"{manifest['bound']:.4f}; v=0 control: {manifest0['violations']} "
              f"violations of {manifest0['bound']:.4f}", ok)


def test_criterion_05_lambda_ode_limits():
    t0 = time.perf_counter()
    traj_s = solve_husimi(DriveProtocol.linear_omega(1.0, 2.0, 1e-4))
    t_sudden = time.perf_counter() - t0
    lam_s = lambda_from_trajectory(traj_s, 1.0, 2.0)
    t0 = time.perf_counter()
    traj_a = solve_husimi(DriveProtocol.linear_omega(1.0, 2.0, 200.0), rel_tol=1e-12)
    t_adiab = time.perf_counter() - t0
    lam_a = lambda_from_trajectory(traj_a, 1.0, 2.0)
    ok = (abs(lam_s - 1.25) < 1e-3
          and lam_a - 1.0 < 1e-4
          and traj_s.wronskian_drift < 1e-9
          and traj_a.wronskian_drift < 1e-9
          and t_sudden < 1.0 and t_adiab < 1.0)
    report(5, f"|lam(1e-4) - 1.25| = {abs(lam_s - 1.25):.2e}, "
              f"lam(200) - 1 = {lam_a - 1.0:.2e}, drifts "
              f"{traj_s.wronskian_drift:.1e}/{traj_a.wronskian_drift:.1e}, "
              f"times {t_sudden:.2f}/{t_adiab:.2f} s", ok)


def test_criterion_06_nonrelativistic_limits():
    v = 1e-12
    worst = 0.0
    for tau in (0.1, 0.25, 0.5, 0.75):
        ca = 1.0 - math.sqrt(tau)
        rk = rezek_kosloff(tau)
        worst = max(worst, abs(emw_adiabatic(tau, v) / ca - 1.0))
        worst = max(worst, abs(eta_ss_mw(tau, v) / rk - 1.0))
    for beta, omega in [(1.0, 1.0), (0.2, 3.0), (2.0, 0.4)]:
        planck = 1.0 / math.expm1(beta * omega)
        worst = max(worst, abs(mean_photon_moving(beta, omega, v) / planck - 1.0))
    report(6, f"worst relative gap to stationary forms {worst:.2e} (< 1e-8)",
           worst < 1e-8)


def test_criterion_07_oracle_equivalence():
    worst = 0.0
    for tau in TAU_GRID:
        for v in V_GRID:
            a = tau * doppler_factor(v)
            z_ad, _ = maximize_scalar(
                lambda z: w_adiabatic_high_t(z, tau, v, 1.0),
                (a, 1.0 - 1e-12), tol=1e-9)
            worst = max(worst, abs(z_ad - math.sqrt(a)))
            z_ss, _ = maximize_scalar(
                lambda z: w_ss_high_t(z, tau, v, 1.0),
                (math.sqrt(a), 1.0 - 1e-12), tol=1e-9)
            worst = max(worst, abs(z_ss - a ** 0.25))
    report(7, f"golden-section vs closed-form optima: worst |dz| = {worst:.2e}"
              " (sqrt(tau f) and (tau f)^(1/4))", worst <= 1e-6)


def test_criterion_08_quadrature_identity():
    worst = 0.0
    for v in [0.1 * i for i in range(1, 10)] + [0.95]:
        closed = math.log((1.0 + v) / (1.0 - v)) / (2.0 * v)
        worst = max(worst, abs(solid_angle_average_inverse_doppler(v) - closed))
    report(8, f"solid-angle average vs closed form: worst abs err {worst:.2e}",
           worst <= 1e-10)


def test_criterion_09_high_t_convergence():
    errs = high_t_convergence("sudden", 0.7, 0.25, 0.9, [1e-1, 1e-2, 1e-3],
                              quantity="efficiency")
    ok = errs[0] > errs[1] > errs[2] and errs[-1] < 1e-4
    report(9, f"sudden-efficiency errors along beta_h = 1e-1..1e-3: "
              f"{[f'{e:.2e}' for e in errs]}", ok)


def test_criterion_10_closure_and_half_cap():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(77)))
    n = 100_000
    omega_c = rng.uniform(0.05, 25.0, n)
    omega_h = omega_c * rng.uniform(1.05, 8.0, n)
    beta_h = rng.uniform(0.005, 4.0, n)
    beta_c = beta_h * rng.uniform(1.05, 15.0, n)
    v = rng.uniform(0.0, 0.99, n)
    lam = (omega_c ** 2 + omega_h ** 2) / (2.0 * omega_c * omega_h)
    w_ab, w_cd, q_h, q_c, w_ext = cycle_quantities(
        omega_c, omega_h, beta_c, beta_h, v, lam)
    scale = np.maximum(np.maximum(np.abs(q_h), np.abs(q_c)), 1.0)
    closure = np.max(np.abs(w_ext + w_ab + w_cd) / scale)
    engine = (w_ext > 0.0) & (q_h > 0.0)
    eta = w_ext[engine] / q_h[engine]
    ok = closure <= 1e-12 and engine.sum() > 1000 and bool(np.all(eta < 0.5))
    report(10, f"closure residual {closure:.1e} over 10^5 points; "
               f"{engine.sum()} engine samples, max sudden eta "
               f"{eta.max():.6f} < 0.5", ok)
