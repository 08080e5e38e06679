"""
Estimates, exponent fits and the experiment drivers at small scale.
"""

import math
import operator

import numpy as np
import pytest
from pytest import approx

import experiments.quasi as quasi_mod
from clusters import ArmEventKind
from experiments import (
    Estimate,
    ExponentFit,
    FitMode,
    QuasiResult,
    estimate_arm,
    estimate_gff_segment_connection,
    estimate_N_lambda,
    estimate_outer_boundary_event,
    estimate_point_connection,
    estimate_surrounding_loop,
    fit_exponent,
    joint_se,
    quasi_mult_ratio,
    reflection_probability,
    resistance_drops,
    verify_resistance_drop,
)
from experiments.tasks import ArmTask, DropTask, drop_context
from scheduler import BudgetError, last_run, plan_budget, record_run, resolve_replicas, run_replicas


# -- Helpers -----------------------------------------------------------------

def _est(mean, k, n, rel=0.1):
    return Estimate(f"syn/k={k}/n={n}", mean, rel * mean, 1000, 0, params={"k": k, "n": n})


# -- Estimate ----------------------------------------------------------------

def test_bernoulli_estimate():
    e = Estimate.from_hits("x", 30, 100, 7)
    assert e.mean == approx(0.3)
    assert e.std_error == approx(math.sqrt(0.3 * 0.7 / 100))
    assert e.relative_error == approx(e.std_error / 0.3)
    with pytest.raises(ValueError):
        Estimate.from_hits("x", 0, 0, 7)


def test_value_estimate():
    e = Estimate.from_values("v", [1.0, 2.0, 3.0, 4.0], 1)
    assert e.mean == approx(2.5)
    assert e.std_error == approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert Estimate.from_values("v", [5.0], 1).std_error == 0.0
    with pytest.raises(ValueError):
        Estimate.from_values("v", [], 1)


def test_estimate_record_round_trip():
    e = Estimate.from_hits("arm/x", 5, 50, 9, params={"k": 2, "n": 8}, wall_time=1.5)
    e.extras["unfiltered_mean"] = 0.2
    rec = e.to_record()
    assert rec["type"] == "estimate"
    back = Estimate.from_record(rec)
    assert back == e
    assert "wall_time" not in e.to_row()
    assert joint_se(e, e) == approx(math.sqrt(2) * e.std_error)


def test_estimates_compare_without_wall_time():
    a = Estimate.from_hits("arm/x", 3, 10, 1, wall_time=0.5)
    b = Estimate.from_hits("arm/x", 3, 10, 1, wall_time=9.0)
    assert a == b
    assert a.to_record()["wall_time"] == 0.5
    assert a != Estimate.from_hits("arm/x", 3, 10, 2, wall_time=0.5)


# -- Exponent fit ------------------------------------------------------------

def test_fit_exact_square_law():
    n = 64
    ests = {(k, n): _est((k / n) ** 2, k, n) for k in (2, 4, 8, 16, 32)}
    fit = fit_exponent(ests)
    assert fit.slope == approx(2.0, abs=1e-9)
    assert fit.exponent == approx(2.0, abs=1e-9)
    assert fit.intercept == approx(0.0, abs=1e-9)


def test_fit_linear_law_intercept():
    n, c = 64, 0.7
    ests = [_est(c * k / n, k, n) for k in (2, 4, 8, 16)]
    fit = fit_exponent(ests, "vary-k")
    assert fit.slope == approx(1.0, abs=1e-9)
    assert fit.intercept == approx(math.log(c), abs=1e-9)


def test_fit_vary_n():
    ests = {(1, n): _est(n ** -2.0, 1, n) for n in (8, 16, 32, 64)}
    fit = fit_exponent(ests, FitMode.VARY_N)
    assert fit.slope == approx(-2.0, abs=1e-9)
    assert fit.exponent == approx(2.0, abs=1e-9)


def test_fit_drops_zero_estimates():
    n = 32
    ests = {(k, n): _est(k / n, k, n) for k in (2, 4, 8, 16)}
    ests[(1, n)] = Estimate("zero", 0.0, 0.0, 100, 0, params={"k": 1, "n": n})
    with pytest.warns(UserWarning):
        fit = fit_exponent(ests)
    assert len(fit.points) == 4
    assert fit.slope == approx(1.0, abs=1e-9)


def test_fit_needs_three_points():
    with pytest.raises(ValueError):
        fit_exponent({(1, 8): _est(0.1, 1, 8), (2, 8): _est(0.2, 2, 8)})


def test_fit_normal_equations():
    rng = np.random.default_rng(50)
    n = 64
    ests = {}
    for k in (2, 4, 8, 16, 32):
        mean = (k / n) * math.exp(rng.normal(scale=0.2))
        ests[(k, n)] = Estimate("noisy", mean, mean * rng.uniform(0.05, 0.3), 1000, 0)
    fit = fit_exponent(ests)
    x, _, w = np.asarray(fit.points).T
    r = fit.residuals()
    assert np.sum(w * r) == approx(0.0, abs=1e-8)
    assert np.sum(w * r * x) == approx(0.0, abs=1e-8)


def test_fit_zero_se_means_uniform_weights():
    n = 16
    ests = {(k, n): Estimate("e", k / n, 0.0, 10, 0) for k in (1, 2, 4)}
    fit = fit_exponent(ests)
    assert [p[2] for p in fit.points] == [1.0, 1.0, 1.0]


def test_fit_record_round_trip():
    fit = fit_exponent({(k, 32): _est(k / 32, k, 32) for k in (1, 2, 4)}, label="f")
    back = ExponentFit.from_record(fit.to_record())
    assert back.slope == approx(fit.slope)
    assert back.mode == FitMode.VARY_K
    assert np.allclose(back.points, fit.points)


# -- Replica engine ----------------------------------------------------------

def test_replicas_keep_seed_order():
    res = run_replicas(float, 200, 1000, jobs=1)
    assert res.shape == (200, 1)
    assert np.array_equal(res[:, 0], 1000 + np.arange(200))


def test_replicas_independent_of_jobs():
    task = ArmTask("two-plus", "metric", 1, 2)
    one = run_replicas(task, 150, 5, jobs=1)
    two = run_replicas(task, 150, 5, jobs=2)
    assert np.array_equal(one, two)


def test_replicas_must_be_positive():
    with pytest.raises(ValueError):
        run_replicas(float, 0, 1, jobs=1)
    with pytest.raises(ValueError):
        resolve_replicas(float, -3, 1, jobs=1)


def test_budget_from_pilot():
    assert resolve_replicas(float, "auto", 1, jobs=1) == 400
    plan = plan_budget(float, 1, jobs=1)
    assert plan.pilot_hits == 400
    assert plan.replicas == 400


def test_budget_zero_pilot_hits_counts_half():
    plan = plan_budget(operator.not_, 1, jobs=1, pilot=100)
    assert plan.pilot_hits == 0
    assert plan.replicas == math.ceil(100 / (0.5 / 100))


def test_budget_cap_raises():
    with pytest.warns(UserWarning):
        with pytest.raises(BudgetError):
            plan_budget(operator.not_, 1, jobs=1, pilot=50, max_replicas=1000)
    with pytest.warns(UserWarning):
        with pytest.raises(BudgetError):
            plan_budget(float, 1, jobs=1, pilot=50, max_seconds=0.0)


def test_run_ledger(tmp_path):
    path = str(tmp_path / "meta" / "last_run.json")
    assert last_run("arm", path) is None
    record_run("arm", {"seed": 3}, path)
    entry = last_run("arm", path)
    assert entry["seed"] == 3
    assert "finished_at" in entry


# -- Arm estimates -----------------------------------------------------------

def test_arm_estimate_is_deterministic():
    kind = ArmEventKind("two-plus", "metric", 1, 2)
    a = estimate_arm(kind, 128, 3, jobs=1)
    b = estimate_arm(kind, 128, 3, jobs=1)
    assert a == b
    assert a.params == {"kind": "two-plus", "setting": "metric", "k": 1, "n": 2}


def test_disjoint_seed_ranges_agree():
    kind = ArmEventKind("two-plus", "metric", 1, 4)
    a = estimate_arm(kind, 3000, 100, jobs=1)
    b = estimate_arm(kind, 3000, 100 + 10 ** 6, jobs=1)
    assert 0 < a.mean < 1
    assert abs(a.mean - b.mean) <= 4 * joint_se(a, b)


def test_four_arm_reports_unfiltered():
    e = estimate_arm(ArmEventKind("four", "metric", 1, 4), 100, 4, jobs=1)
    assert e.extras["unfiltered_mean"] >= e.mean
    assert "unfiltered_std_error" in e.extras


def test_discrete_arm_records_alpha():
    e = estimate_arm(ArmEventKind("two-plus", "discrete", 1, 2), 50, 5, alpha=0.3, jobs=1)
    assert e.params["alpha"] == 0.3
    assert 0.0 <= e.mean <= 1.0


def test_arm_estimate_rejects_bad_input():
    with pytest.raises(ValueError):
        ArmEventKind("four", "metric", 8, 8)
    with pytest.raises(ValueError):
        estimate_arm(ArmEventKind("four", "metric", 1, 4), 0, 1, jobs=1)


# -- Quasi-multiplicativity --------------------------------------------------

def test_quasi_ratio_small():
    res = quasi_mult_ratio(4, 2, 1000, 6, jobs=1)
    assert res.ratio == approx(res.whole.mean / (res.inner.mean * res.outer.mean))
    assert res.ratio_se > 0
    seeds = {res.whole.seed, res.inner.seed, res.outer.seed}
    assert len(seeds) == 3
    back = QuasiResult.from_record(res.to_record())
    assert back.ratio == approx(res.ratio)
    assert back.params == {"setting": "metric"}


def test_quasi_zero_estimate_raises(monkeypatch):
    def zero(kind, replicas, seed, **kw):
        return Estimate(f"arm/{kind.label}", 0.0, 0.0, int(replicas), seed)

    monkeypatch.setattr(quasi_mod, "estimate_arm", zero)
    with pytest.raises(ValueError, match="zero estimate"):
        quasi_mult_ratio(16, 4, 10, 1)


def test_quasi_needs_k_at_least_two():
    with pytest.raises(ValueError):
        quasi_mult_ratio(16, 1, 10, 1)
    with pytest.raises(ValueError):
        quasi_mult_ratio(16, 9, 10, 1)


# -- N(Λ) and landmark events ------------------------------------------------

def test_nlambda_validation():
    with pytest.raises(ValueError):
        estimate_N_lambda(16, 2, 1)
    with pytest.raises(ValueError):
        estimate_N_lambda(32, 2, 1, setting="discrete")
    with pytest.raises(ValueError):
        estimate_N_lambda(32, 2, 1, setting="other")


def test_nlambda_metric_runs():
    e = estimate_N_lambda(32, 3, 7, jobs=1)
    assert e.replicas == 3
    assert e.mean >= 0
    assert e.params == {"n": 32, "setting": "metric"}


def test_nlambda_discrete_runs():
    e = estimate_N_lambda(32, 2, 8, setting="discrete", k=2, jobs=1)
    assert e.params["k"] == 2
    assert e.mean >= 0


def test_landmark_events_run():
    with pytest.raises(ValueError):
        estimate_surrounding_loop(3, 10, 1)
    with pytest.raises(ValueError):
        estimate_outer_boundary_event(8, 10, 1)
    s = estimate_surrounding_loop(4, 40, 9, jobs=1)
    assert 0.0 <= s.mean <= 1.0
    o = estimate_outer_boundary_event(16, 10, 10, jobs=1)
    assert 0.0 <= o.mean <= 1.0


# -- Boundary-data checks ----------------------------------------------------

def test_reflection_probability():
    assert reflection_probability(0.0, 1.0) == 0.0
    assert reflection_probability(1.0, 1.0) == approx(0.682689, abs=1e-6)
    assert reflection_probability(1.0, 1e12) == approx(0.0, abs=1e-5)
    assert reflection_probability(0.3, 0.01) > reflection_probability(0.3, 0.1)


def test_resistance_drops_are_bounded():
    n, k = 4, 2
    _, x0, r0, m = drop_context(n, k)
    assert x0 == (0, 6)
    assert 0 < m < 1
    drops = resistance_drops(n, k, 40, 11, jobs=1)
    assert np.all(drops >= -1e-12)
    assert np.all(drops <= r0 + 1e-12)
    drop, over = DropTask(n, k, threshold=0.0)(11)
    assert drop == drops[0]
    assert over == float(drop > 0)


def test_verify_resistance_drop_small():
    n, k = 4, 2
    est, analytic = verify_resistance_drop(n, k, 1e9, 30, 12, jobs=1)
    assert est.mean == 0.0
    assert analytic == approx(0.0, abs=1e-3)
    assert est.extras["analytic"] == analytic
    with pytest.raises(ValueError):
        verify_resistance_drop(n, k, 0.0, 30, 12)


def test_zero_boundary_level_gives_zero_drop():
    est, analytic = verify_resistance_drop(4, 2, 0.05, 30, 15, jobs=1, level=0.0)
    assert est.extras["harmonic_mean_x0"] == 0.0
    assert analytic == 0.0
    assert est.mean == 0.0
    assert np.all(resistance_drops(4, 2, 20, 15, jobs=1, level=0.0) == 0.0)


def test_resistance_drop_auto_budget():
    drops = resistance_drops(4, 2, "auto", 16, jobs=1, threshold=1e-6)
    assert len(drops) >= 400
    est, _ = verify_resistance_drop(4, 2, 1e-6, "auto", 16, jobs=1)
    assert est.replicas == len(drops)
    assert est.mean == np.count_nonzero(drops > 1e-6) / len(drops)


def test_connection_events_run():
    s = estimate_gff_segment_connection(4, 1, 40, 13, jobs=1)
    assert 0.0 <= s.mean <= 1.0
    p = estimate_point_connection(4, 40, 14, jobs=1)
    assert 0.0 <= p.mean <= 1.0
    with pytest.raises(ValueError):
        estimate_point_connection(1, 40, 14)
