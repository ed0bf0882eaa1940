"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Each test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary under "acceptance criteria".
"""

import json
import math
import time

import numpy as np

from ridgebounds import bounds, checks, cli, experiments
from ridgebounds.bounds import SignalSpec
from ridgebounds.spectrum import Spectrum


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def test_c01_dual_primal_equivalence(criterion):
    report, secs = timed(checks.dual_primal, seed=2024, samples=200)
    worst = report.checks[0].measured
    criterion(1, "dual/primal equivalence", worst <= 1e-8 and secs < 10,
              f"max rel deviation {worst:.2e} (<= 1e-8) over 200 instances in {secs:.1f}s (< 10s)")


def test_c02_identity_residual(criterion):
    report, secs = timed(checks.identity, seed=2024, samples=100)
    c = report.checks[0]
    negatives = c.detail["negative_lambda_cases"]
    criterion(2, "identity residual", c.measured <= 1e-8 and negatives > 0 and secs < 10,
              f"max relative residual {c.measured:.2e} (<= 1e-8), {negatives} negative-lambda cases, {secs:.1f}s (< 10s)")


def test_c03_variance_monte_carlo(criterion):
    report, secs = timed(checks.variance_mc, seed=2024, samples=10, draws=100_000)
    worst = max(c.measured for c in report.checks)
    criterion(3, "exact vs Monte Carlo variance", report.passed and secs < 60,
              f"worst |mean - exact| = {worst:.2f} SE (<= 3) over 10 instances, {secs:.1f}s (< 60s)")


def test_c04_ratio_caps(criterion):
    report, secs = timed(checks.ratio_caps, seed=2024, samples=500)
    low, excess = report.checks
    criterion(4, "matched-bound ratio caps", report.passed and secs < 5,
              f"min ratio {low.measured:.6f} (>= 1 - 1e-9), max ratio - cap {excess.measured:.3e} (<= 1e-9), "
              f"{low.detail['ratios_evaluated']} ratios, {secs:.1f}s (< 5s)")


def test_c05_worked_matched_instance(criterion):
    m = bounds.matched_bounds(Spectrum(np.ones(100)), SignalSpec(np.eye(100)[0]), 10, 0.0, 0)
    expected = (100 / 121, 1.0, 10 / 144, 1 / 10)
    err = max(abs(a - b) for a, b in zip(m, expected))
    criterion(5, "worked matched-bound instance", err <= 1e-12, f"max abs error {err:.1e} (<= 1e-12)")


def test_c06_negative_regularization(criterion):
    cfg = experiments.preset_spiked(4, 8000, 500.0, 1.0, 200, 100.0, replicates=100, base_seed=6)
    sweep, secs = timed(experiments.run_sweep, cfg)
    opt = sweep.lambda_opt
    gap = -experiments.mse_gap(sweep, opt, 0.0)
    at_opt, at_zero = sweep.aggregate(opt)["mean"], sweep.aggregate(0.0)["mean"]
    criterion(6, "negative regularization wins", opt < 0 and gap > 3 and secs < 600,
              f"lambda_opt={opt:.1f}, mean mse {at_opt:.5f} vs {at_zero:.5f} at 0, "
              f"gap {gap:.1f} combined SE (> 3), {secs:.1f}s (< 600s)")


def test_c07_exponential_regime(criterion):
    means, start = [], time.perf_counter()
    for n in (250, 500, 1000):
        cfg = experiments.preset_exponential_decay(n ** (-1 / 3), n, replicates=20, base_seed=7)
        center = n * math.exp(-(n ** (-1 / 3)) * (cfg.k_policy["k"] + 1))
        cfg.lambda_grid = [center]
        means.append(experiments.run_sweep(cfg).aggregate(center)["mean"])
    secs = time.perf_counter() - start
    decreasing = means[0] > means[1] > means[2]
    criterion(7, "exponential decay regime", decreasing and secs < 600,
              f"mean mse at n=250,500,1000: {', '.join(f'{m:.4f}' for m in means)} (strictly decreasing), "
              f"{secs:.1f}s (< 600s)")


def test_c08_eigenvalue_envelope_audit(criterion):
    upper, lower, start = [], [], time.perf_counter()
    for n in (100, 200, 400):
        spec = experiments.preset_plateau(n).build_spectrum()
        audit = experiments.concentration_audit(spec, "gaussian", n, 0, 0.0, 200, seed=8, quad_form="identity")
        total, total_sq = spec.tail_sum(0), spec.tail_sq_sum(0)
        up = audit.raw["mu_max_A0"] / (total + n * spec.eigenvalues[0])
        low = (total - audit.raw["mu_min_A0"]) / math.sqrt(n * total_sq)
        upper.append(float(np.quantile(up, 0.9)))
        lower.append(float(np.quantile(low, 0.9)))
    secs = time.perf_counter() - start
    spread_up, spread_low = max(upper) / min(upper), max(lower) / min(lower)
    criterion(8, "eigenvalue envelope audit", spread_up < 2 and spread_low < 2 and secs < 300,
              f"q0.9 upper constants {[round(u, 3) for u in upper]} (spread x{spread_up:.3f}), "
              f"lower {[round(v, 3) for v in lower]} (spread x{spread_low:.3f}), both < x2, {secs:.1f}s (< 300s)")


def test_c09_lower_bound_sanity(criterion):
    rows, secs = timed(experiments.lower_bound_sanity, experiments.preset_plateau(100, replicates=100, base_seed=9))
    b_rate = np.mean([r["B_lower"] <= r["B_mean"] for r in rows])
    v_rate = np.mean([r["V_lower"] <= r["V_mean"] for r in rows])
    criterion(9, "lower-bound sanity", b_rate >= 0.95 and v_rate >= 0.95 and secs < 300,
              f"B_lower <= mean B in {b_rate:.0%}, V_lower <= mean V in {v_rate:.0%} of 100 replicates (>= 95%), "
              f"{secs:.1f}s (< 300s)")


def test_c10_determinism(criterion, tmp_path):
    cfg = experiments.preset_spiked(3, 2000, 100.0, 1.0, 100, 50.0, replicates=24, base_seed=10)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    start = time.perf_counter()
    for t in (1, 8):
        assert cli.main(["simulate", "--config", str(path), "--out", str(tmp_path / f"t{t}"), "--threads", str(t)]) == 0
    secs = time.perf_counter() - start
    a, b = (tmp_path / "t1" / "sweep.csv").read_bytes(), (tmp_path / "t8" / "sweep.csv").read_bytes()
    criterion(10, "thread-count determinism", a == b and secs < 60,
              f"threads 1 vs 8 CSV byte-identical: {a == b} ({len(a)} bytes), {secs:.1f}s (< 60s)")
