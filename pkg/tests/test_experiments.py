import csv
import io
import math

import numpy as np
import pytest

from ridgebounds import experiments as ex
from ridgebounds.estimator import GramPath, sample_design
from ridgebounds.exceptions import ConfigError, DomainError
from ridgebounds.spectrum import build_spectrum


def tiny_config(**over):
    doc = {
        "spectrum": {"model": "spiked", "k_spikes": 2, "lambda_top": 10.0, "lambda_tail": 1.0, "p": 60},
        "n": 8, "lambda_grid": [0.0, 1.0, 50.0], "signal": {"kind": "spikes"}, "replicates": 4,
        "base_seed": 7, "k_policy": {"kind": "fixed", "k": 2},
    }
    doc.update(over)
    return ex.ExperimentConfig.from_dict(doc)


@pytest.mark.parametrize("bad", [
    {"lambda_grid": []}, {"replicates": 0}, {"n": 0}, {"design": "cauchy"}, {"k_policy": {"kind": "auto"}},
    {"k_policy": {"kind": "kstar", "b": -1}}, {"base_seed": -1}, {"bound_constants": {"q": 1}},
    {"lambda_grid": ["a"]}, {"sigma_eps": -1.0},
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        tiny_config(**bad)


def test_config_unknown_and_missing_fields():
    with pytest.raises(ConfigError, match="unknown"):
        tiny_config(extra=1)
    with pytest.raises(ConfigError, match="missing"):
        ex.ExperimentConfig.from_dict({"n": 3})


def test_config_round_trip():
    cfg = tiny_config()
    assert ex.ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_signal_builders():
    spec = build_spectrum({"model": "spiked", "k_spikes": 3, "lambda_top": 4.0, "lambda_tail": 1.0, "p": 10})
    s = ex.build_signal({"kind": "spikes", "energy": 2.0}, spec)
    assert np.count_nonzero(s.theta_star) == 3 and s.energy(spec) == pytest.approx(2.0)
    a = ex.build_signal({"kind": "aligned_decay"}, spec)
    assert a.energy(spec) == pytest.approx(1.0)
    np.testing.assert_allclose(a.theta_star / a.theta_star[-1], np.sqrt(spec.eigenvalues))
    assert ex.build_signal({"kind": "zero"}, spec).energy(spec) == 0
    e = ex.build_signal({"kind": "explicit", "values": list(range(10))}, spec)
    assert e.theta_star[3] == 3
    with pytest.raises(ConfigError):
        ex.build_signal({"kind": "nope"}, spec)
    with pytest.raises(DomainError):
        ex.build_signal({"kind": "explicit", "values": [1.0]}, spec)


def test_seed_streams_independent():
    a = np.random.default_rng(ex.derive_seed(1, 0, "design")).random(4)
    b = np.random.default_rng(ex.derive_seed(1, 0, "noise")).random(4)
    c = np.random.default_rng(ex.derive_seed(1, 1, "design")).random(4)
    d = np.random.default_rng(ex.derive_seed(1, 0, "design")).random(4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    np.testing.assert_array_equal(a, d)


def test_replicate_rows_match_direct_computation():
    cfg = tiny_config()
    res = ex.run_replicate(cfg, 2)
    spec = cfg.build_spectrum()
    X = sample_design(cfg.design, spec, cfg.n, ex.derive_seed(cfg.base_seed, 2, "design"))
    path = GramPath(X, spec, cfg.build_signal(spec))
    for row in res.rows:
        assert row["bias"] == path.bias(row["lambda"])
        assert row["mse"] == row["bias"] + row["variance_expected"]
    assert ex.run_replicate(cfg, 2) == res


def test_non_pd_rows_are_flagged():
    cfg = tiny_config(lambda_grid=[-1e6, 0.0])
    rows = ex.run_replicate(cfg, 0).rows
    assert not rows[0]["pd"] and math.isnan(rows[0]["mse"]) and rows[0]["pd_margin"] < 0
    assert rows[1]["pd"] and rows[1]["mse"] > 0
    sweep = ex.run_sweep(cfg)
    assert sweep.per_lambda[0]["available"] is False and sweep.per_lambda[0]["n_valid"] == 0
    assert sweep.lambda_opt == 0.0
    assert sweep.bound_overlay[0] is None


def test_bias_largest_lambda_exceeds_zero():
    cfg = tiny_config(lambda_grid=[0.0, 1e6])
    for r in range(4):
        rows = ex.run_replicate(cfg, r).rows
        assert rows[1]["bias"] >= rows[0]["bias"]


def test_single_replicate_aggregates_equal_row():
    sweep = ex.run_sweep(tiny_config(replicates=1))
    for agg, row in zip(sweep.per_lambda, sweep.rows):
        for key in ("mean", "median", "q10", "q90"):
            assert agg[key] == row["mse"]
        assert agg["se"] == 0.0


def test_aggregates_recomputable_from_csv():
    sweep = ex.run_sweep(tiny_config(replicates=5))
    table = list(csv.DictReader(io.StringIO(sweep.to_csv())))
    assert tuple(table[0]) == ex.SWEEP_COLUMNS
    for agg in sweep.per_lambda:
        mse = np.array([float(r["mse"]) for r in table if float(r["lambda"]) == agg["lambda"]])
        assert agg["mean"] == mse.mean()
        assert agg["median"] == np.median(mse)
        assert agg["q10"] == np.quantile(mse, 0.1)
    opt = min(sweep.per_lambda, key=lambda a: a["mean"])["lambda"]
    assert sweep.lambda_opt == opt


def test_thread_count_does_not_change_output():
    cfg = tiny_config(replicates=6)
    assert ex.run_sweep(cfg, threads=1).to_csv() == ex.run_sweep(cfg, threads=4).to_csv()


def test_summary_shape():
    s = ex.run_sweep(tiny_config()).summary()
    assert set(s) == {"lambda_grid", "per_lambda", "lambda_opt", "bound_overlay"}
    assert s["bound_overlay"][0]["k"] == 2


def test_kstar_policy_overlay():
    cfg = tiny_config(k_policy={"kind": "kstar", "b": 2.0})
    sweep = ex.run_sweep(cfg)
    for agg, rep in zip(sweep.per_lambda, sweep.bound_overlay):
        assert rep is not None and rep.k_mode == "kstar"


def test_compare_bounds_conventions():
    zero = ex.run_sweep(tiny_config(signal={"kind": "zero"}))
    table = ex.compare_bounds(zero)
    assert all(t["B_over_upper"] == 1.0 for t in table)
    base = ex.compare_bounds(ex.run_sweep(tiny_config()))
    scaled = ex.compare_bounds(ex.run_sweep(tiny_config(sigma_eps=3.0)))
    for a, b in zip(base, scaled):
        assert b["V_over_upper"] == pytest.approx(a["V_over_upper"], rel=1e-12)
        assert b["lower_over_V"] == pytest.approx(a["lower_over_V"], rel=1e-12)


def test_mse_gap_sign():
    sweep = ex.run_sweep(tiny_config(replicates=6))
    assert ex.mse_gap(sweep, 0.0, 0.0) == 0.0
    a = sweep.aggregate(50.0)
    b = sweep.aggregate(0.0)
    expected = (a["mean"] - b["mean"]) / math.hypot(a["se"], b["se"])
    assert ex.mse_gap(sweep, 50.0, 0.0) == pytest.approx(expected)


def test_preset_exponential():
    cfg = ex.preset_exponential_decay(0.1, 1000)
    assert cfg.k_policy == {"kind": "fixed", "k": 100}
    center = cfg.lambda_grid[len(cfg.lambda_grid) // 2]
    assert center == pytest.approx(1000 * math.exp(-10.1), rel=1e-14)
    assert cfg.lambda_grid[-1] / cfg.lambda_grid[0] == pytest.approx(1e4)
    spec = cfg.build_spectrum()
    np.testing.assert_array_equal(spec.eigenvalues, build_spectrum({"model": "exponential", "gamma": 0.1, "p": spec.p}).eigenvalues)
    assert spec.eigenvalues[-1] >= 1e-16 * spec.eigenvalues[0]
    assert ex.exponential_truncation(5.0) < ex.exponential_truncation(0.5)
    with pytest.raises(DomainError):
        ex.preset_exponential_decay(0.0, 100)


def test_preset_spiked():
    cfg = ex.preset_spiked(4, 8000, 500.0, 1.0, 200, 100.0)
    spec = cfg.build_spectrum()
    sig = cfg.build_signal(spec)
    assert 0.0 in cfg.lambda_grid
    assert sig.energy(spec) / cfg.sigma_eps**2 == pytest.approx(100.0)
    assert np.count_nonzero(sig.theta_star) == 4
    xi = math.sqrt(200 / 4)
    assert any(l == pytest.approx(-7996 + xi * math.sqrt(200 * 8000)) for l in cfg.lambda_grid)
    assert min(cfg.lambda_grid) < -spec.tail_sum(4) + 2 * math.sqrt(200 * 8000)
    with pytest.raises(DomainError):
        ex.preset_spiked(4, 100, 500.0, 1.0, 200, 100.0)
    with pytest.raises(DomainError):
        ex.preset_spiked(4, 8000, 500.0, 1.0, 200, 0.0)


def test_preset_plateau():
    cfg = ex.preset_plateau(20)
    spec = cfg.build_spectrum()
    assert spec.p == 1000 and np.all(spec.eigenvalues == 1.0)
    assert cfg.k_for(spec, 0.0) == 0


def plateau(n, p, scale=1.0):
    return build_spectrum({"model": "spiked", "k_spikes": 0, "lambda_top": scale, "lambda_tail": scale, "p": p})


def test_audit_sum_of_norms_and_structure():
    a = ex.concentration_audit(plateau(30, 300), "gaussian", 30, 0, 0.0, 150, seed=3)
    s = a.statistics["sum_of_squared_norms"]
    assert abs(s["mean"] - s["expected"]) <= 3 * s["se"]
    for name in ("weighted_norm", "quadratic_form", "offdiagonal_gram"):
        assert set(a.statistics[name]["constant_quantiles"]) == {"0.5", "0.9", "0.99"}
    d = a.to_dict()
    assert d["samples"] == 150 and d["seed"] == 3
    with pytest.raises(DomainError):
        ex.concentration_audit(plateau(30, 300), "gaussian", 30, 0, 0.0, 50, seed=3)


def test_audit_constants_scale_invariant():
    a = ex.concentration_audit(plateau(20, 200), "gaussian", 20, 0, 0.0, 100, seed=5)
    b = ex.concentration_audit(plateau(20, 200, scale=7.0), "gaussian", 20, 0, 0.0, 100, seed=5)
    for name in ("sum_of_squared_norms", "weighted_norm", "offdiagonal_gram"):
        qa, qb = a.statistics[name]["constant_quantiles"], b.statistics[name]["constant_quantiles"]
        for q in qa:
            assert qb[q] == pytest.approx(qa[q], rel=1e-10)


def test_audit_spiked_tail_and_envelope_hits():
    spec = build_spectrum({"model": "spiked", "k_spikes": 2, "lambda_top": 30.0, "lambda_tail": 1.0, "p": 800})
    a = ex.concentration_audit(spec, "rademacher", 20, 2, 0.0, 100, seed=1, calibration_c=2.0)
    env = a.statistics["A_k_envelope"]
    assert 0.0 <= env["hit_rate_upper"] <= 1.0
    assert env["hit_rate_upper"] == 1.0
    assert "hit_rate_lower" in a.statistics["A_0_envelope"]


def test_quadratic_form_identity_quantile():
    ratios = ex.quadratic_form_ratios(1000, 200, seed=0)
    assert np.quantile(ratios, 0.99) <= 1 + 4 / math.sqrt(1000)
    assert abs(ratios.mean() - 1) < 0.01


def test_lower_bound_sanity_rows():
    rows = ex.lower_bound_sanity(ex.preset_plateau(20, replicates=5))
    assert len(rows) == 5
    assert all(r["B_lower"] <= r["B_mean"] and r["V_lower"] <= r["V_mean"] for r in rows)
