"""Acceptance suite: one test per criterion, each printing PASS/FAIL lines.

The Monte Carlo criteria use the desk-scale design (n = 1e5, h = 1e-3,
t_n = 100) so the full-size theoretical standard errors apply unchanged.
"""
import itertools
import json
import os
import time

import numpy as np

import hidden_ou as ho
from hidden_ou.cli import main

from conftest import A_STAR, ALPHA_STAR, B_STAR, GAMMA_PLUS_STAR, SIGMA_STAR

WORKERS = min(os.cpu_count() or 1, 4)

DESK_SCHEME = ho.SamplingScheme(n=100_000, h=1e-3)

SE_A = 0.2115
SE_B = 0.01324


def _report(tag: str, ok: bool, detail: str) -> bool:
    print(f"[{tag}] {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


def _desk_mc(spec, theta_star, replications, scenario, base_seed):
    cfg = ho.McConfig(spec=spec, theta_true=theta_star, scheme=DESK_SCHEME,
                      replications=replications, base_seed=base_seed,
                      scenario=scenario, worker_count=WORKERS)
    return ho.run_mc(cfg)


def test_ac01_riccati_closed_form_grid(spec):
    t0 = time.perf_counter()
    worst = 0.0
    for a in np.linspace(0.5, 3.0, 10):
        for b in np.linspace(0.1, 1.0, 10):
            theta = ho.ThetaPoint([SIGMA_STAR], [a, b])
            closed = SIGMA_STAR**2 * a * (np.sqrt(1 + b**2 / (SIGMA_STAR**2 * a**2)) - 1)
            for method in ("auto", "schur"):
                sol = ho.solve_are(spec, theta, want_minus=False, method=method)
                worst = max(worst, abs(sol.gamma_plus[0, 0] - closed))
    elapsed = time.perf_counter() - t0
    ok = _report("AC1", worst < 1e-10 and elapsed < 1.0,
                 f"max |gamma+ - closed form| = {worst:.3g} over 10x10 grid "
                 f"(tol 1e-10), runtime {elapsed:.2f}s (< 1s)")
    assert ok


def test_ac02_riccati_ode_decay_rate(spec, theta_star):
    t0 = time.perf_counter()
    sol = ho.solve_are(spec, theta_star, want_minus=False)
    times, gammas = ho.integrate_riccati_ode(spec, theta_star, np.zeros((1, 1)),
                                             t_final=0.5, dt=5e-4)
    mask = (times >= 0.1) & (times <= 0.5)
    dev = np.linalg.norm(gammas - sol.gamma_plus, axis=(1, 2))
    slope = np.polyfit(times[mask], np.log(dev[mask]), 1)[0]
    expected = -2.0 * ALPHA_STAR
    elapsed = time.perf_counter() - t0
    ok = _report("AC2", abs(slope - expected) < 0.1 * abs(expected) and elapsed < 5.0,
                 f"fitted decay {slope:.3f} vs -2*alpha = {expected:.3f} "
                 f"(tol 10%), runtime {elapsed:.2f}s (< 5s)")
    assert ok


def test_ac03_stage_one_standard_error_formula(spec, theta_star):
    info = ho.evaluate_info(spec, theta_star, ho.SamplingScheme(n=10**6, h=1e-4))
    closed = SIGMA_STAR / np.sqrt(2e6)
    rel = abs(info.se1[0] - closed) / closed
    ok = _report("AC3", rel < 1e-10,
                 f"se(sigma) = {info.se1[0]:.10g} vs sigma*/sqrt(2n) = {closed:.10g} "
                 f"(rel dev {rel:.2e}, tol 1e-10); table value 1.41421e-5")
    assert ok


def test_ac04_stage_two_standard_errors(spec, theta_star):
    t0 = time.perf_counter()
    closed = ho.gamma2_closed_form_1d(spec, theta_star)
    quad = ho.gamma2_quadrature(spec, theta_star)
    cross = np.max(np.abs(closed - quad))
    se = np.sqrt(np.diag(np.linalg.inv(closed)) / 100.0)
    rel_a = abs(se[0] - SE_A) / SE_A
    rel_b = abs(se[1] - SE_B) / SE_B
    elapsed = time.perf_counter() - t0
    ok = _report("AC4", rel_a < 5e-3 and rel_b < 5e-3 and cross < 1e-6 and elapsed < 5.0,
                 f"se = ({se[0]:.6g}, {se[1]:.6g}) vs (0.2115, 0.01324), rel dev "
                 f"({rel_a:.2e}, {rel_b:.2e}) (tol 0.5%); closed-vs-quadrature "
                 f"{cross:.2e} (tol 1e-6); runtime {elapsed:.2f}s (< 5s)")
    assert ok


def test_ac05_desk_scale_consistency(spec, theta_star):
    t0 = time.perf_counter()
    summary, _ = _desk_mc(spec, theta_star, replications=200, scenario="i",
                          base_seed=1000)
    elapsed = time.perf_counter() - t0
    p = summary.to_dict()["parameters"]
    tol_a = 3 * SE_A / np.sqrt(200)
    tol_b = 3 * SE_B / np.sqrt(200)
    tol_s = 3 * SIGMA_STAR / np.sqrt(2 * DESK_SCHEME.n * 200)
    checks = [
        _report("AC5.a-mean", abs(p["a"]["mean"] - A_STAR) < tol_a,
                f"|mean(a_hat) - 1.5| = {abs(p['a']['mean'] - A_STAR):.4g} "
                f"(tol {tol_a:.4g})"),
        _report("AC5.b-mean", abs(p["b"]["mean"] - B_STAR) < tol_b,
                f"|mean(b_hat) - 0.3| = {abs(p['b']['mean'] - B_STAR):.4g} "
                f"(tol {tol_b:.4g})"),
        _report("AC5.sigma-mean", abs(p["sigma"]["mean"] - SIGMA_STAR) < tol_s,
                f"|mean(sigma_hat) - 0.02| = {abs(p['sigma']['mean'] - SIGMA_STAR):.4g} "
                f"(tol {tol_s:.4g})"),
    ]
    for name in ("sigma", "a", "b"):
        ratio = p[name]["sd"] / p[name]["theoretical_se"]
        checks.append(_report(f"AC5.{name}-sd", 0.8 <= ratio <= 1.25,
                              f"sd/theoretical = {ratio:.3f} (bounds [0.8, 1.25])"))
    checks.append(_report("AC5.runtime", elapsed < 600.0,
                          f"R=200 study took {elapsed:.0f}s (< 600s)"))
    assert all(checks)


def test_ac06_standardized_error_normality(spec, theta_star):
    summary, _ = _desk_mc(spec, theta_star, replications=500, scenario="i",
                          base_seed=2000)
    p = summary.to_dict()["parameters"]
    checks = []
    for name in ("sigma", "a", "b"):
        checks.append(_report(f"AC6.{name}-z-mean", abs(p[name]["z_mean"]) < 0.15,
                              f"|mean z| = {abs(p[name]['z_mean']):.3f} (tol 0.15)"))
        checks.append(_report(f"AC6.{name}-z-sd", 0.85 <= p[name]["z_sd"] <= 1.15,
                              f"sd z = {p[name]['z_sd']:.3f} (bounds [0.85, 1.15])"))
    assert all(checks)


def test_ac07_wrong_start_and_burn_in_orderings(spec, theta_star):
    s2, _ = _desk_mc(spec, theta_star, replications=200, scenario="ii", base_seed=3000)
    s3, _ = _desk_mc(spec, theta_star, replications=200, scenario="iii", base_seed=3000)
    p2 = s2.to_dict()["parameters"]
    p3 = s3.to_dict()["parameters"]
    checks = [
        _report("AC7.a-above", p2["a"]["mean"] > A_STAR,
                f"scenario (ii) mean(a_hat) = {p2['a']['mean']:.4f} > 1.5"),
        _report("AC7.b-above", p2["b"]["mean"] > B_STAR,
                f"scenario (ii) mean(b_hat) = {p2['b']['mean']:.5f} > 0.3"),
        _report("AC7.a-reduced", abs(p3["a"]["bias"]) < abs(p2["a"]["bias"]),
                f"|bias(a)| (iii) {abs(p3['a']['bias']):.4f} < (ii) "
                f"{abs(p2['a']['bias']):.4f}"),
        _report("AC7.b-reduced", abs(p3["b"]["bias"]) < abs(p2["b"]["bias"]),
                f"|bias(b)| (iii) {abs(p3['b']['bias']):.5f} < (ii) "
                f"{abs(p2['b']['bias']):.5f}"),
    ]
    assert all(checks)


def test_ac08_filter_equivalence_and_forgetting(spec, theta_star):
    sol = ho.solve_are(spec, theta_star, want_minus=False)
    gain = GAMMA_PLUS_STAR / SIGMA_STAR**2
    sch = ho.SamplingScheme(n=1000, h=1e-3)
    t = sch.times()
    d = t[:, None] - t[None, :-1]
    kernel = np.where(d > 0, np.exp(-ALPHA_STAR * d), 0.0)
    worst = 0.0
    for seed in range(100):
        path = ho.simulate_path(spec, theta_star, sch, seed=seed, keep_x=False)
        fp = ho.run_discrete_filter(path, spec, theta_star, m0=0.0)
        direct = kernel @ (gain * path.increments()[:, 0])
        rel = np.max(np.abs(fp.m_hat[:, 0] - direct) / (1 + np.abs(fp.m_hat[:, 0])))
        worst = max(worst, rel)
    ok_equiv = _report("AC8.convolution", worst < 1e-10,
                       f"max relative recursion-vs-direct-sum deviation {worst:.2e} "
                       "over 100 paths (tol 1e-10)")

    path = ho.simulate_path(spec, theta_star, sch, seed=123, keep_x=False)
    f0 = ho.run_discrete_filter(path, spec, theta_star, m0=0.0)
    f1 = ho.run_discrete_filter(path, spec, theta_star, m0=1.0)
    diff = np.abs(f1.m_hat[:, 0] - f0.m_hat[:, 0])
    envelope = np.exp(-np.min(sol.alpha.real) * t) * (1 + 1e-6) + 1e-10
    ok_forget = _report("AC8.forgetting", bool(np.all(diff <= envelope)),
                        "wrong-m0 difference stays under the exp(-alpha t) envelope")
    assert ok_equiv and ok_forget


def test_ac09_identifiability_diagnostics(spec, theta_star):
    grid_a = np.linspace(0.5, 3.0, 6)
    grid_b = np.linspace(0.1, 0.9, 5)
    worst_cross = 0.0
    y2_vals = {}
    for a, b in itertools.product(grid_a, grid_b):
        closed = ho.y2_closed_form_1d(spec, [a, b], theta_star)
        quad = ho.y2(spec, [a, b], theta_star)
        worst_cross = max(worst_cross, abs(closed - quad))
        y2_vals[(a, b)] = closed
    ok_cross = _report("AC9.cross-check", worst_cross < 1e-8,
                       f"max |quadrature - closed form| = {worst_cross:.2e} "
                       "(tol 1e-8) on the dynamics grid")

    y1_grid = np.linspace(0.006, 0.09, 15)
    y1_vals = {s: ho.y1(spec, [s], theta_star.theta1) for s in y1_grid}
    c1 = min(-v / (s - SIGMA_STAR) ** 2 for s, v in y1_vals.items()
             if abs(s - SIGMA_STAR) > 1e-12)
    c2 = min(-v / ((a - A_STAR) ** 2 + (b - B_STAR) ** 2)
             for (a, b), v in y2_vals.items()
             if (a - A_STAR) ** 2 + (b - B_STAR) ** 2 > 1e-12)
    at_truth = (ho.y1(spec, theta_star.theta1, theta_star.theta1),
                ho.y2_closed_form_1d(spec, theta_star.theta2, theta_star))
    ok_dom = _report(
        "AC9.domination",
        all(v <= 0 for v in y1_vals.values()) and all(v <= 0 for v in y2_vals.values())
        and c1 > 0 and c2 > 0 and at_truth == (0.0, 0.0),
        f"y1, y2 <= 0 with equality only at the truth; fitted constants "
        f"c1 = {c1:.3g}, c2 = {c2:.3g} > 0")
    assert ok_cross and ok_dom


def test_ac10_mc_determinism_across_workers(tmp_path):
    data = {
        "model": {"family": "scalar", "c": 1.0,
                  "theta1_box": [[0.005, 0.1]],
                  "theta2_box": [[0.1, 5.0], [0.02, 1.0]]},
        "theta_true": {"theta1": [0.02], "theta2": [1.5, 0.3]},
        "scheme": {"n": 5000, "h": 0.001},
        "mc": {"replications": 6, "scenario": "i", "base_seed": 42, "workers": 1},
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(data))
    outs = []
    for workers in (1, 2):
        out = tmp_path / f"w{workers}"
        code = main(["mc", "--config", str(cfg), "--out", str(out),
                     "--workers", str(workers)])
        assert code == 0
        outs.append((out / "summary.json").read_bytes())
    ok = _report("AC10", outs[0] == outs[1],
                 "summary.json byte-identical for worker counts 1 and 2")
    assert ok
