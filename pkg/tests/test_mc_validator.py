import numpy as np
import pytest

from tfqkd.concentration import BoundModel, interval
from tfqkd.mc_validator import (MIN_TRIALS, bernoulli_coverage, decoy_sandwich_check,
                                exact_t_values, model_bounds, poisson_weights,
                                sandwich_violations)


@pytest.mark.parametrize("model", list(BoundModel))
def test_vectorised_bounds_match_scalar(model):
    obs = np.array([2800, 3000, 3150])
    lo, up, usable = model_bounds(model, obs, 10_000, 1e-3, 1e-3)
    for o, l, u, ok in zip(obs, lo, up, usable):
        assert ok
        iv = interval(model, float(o), 10_000, 1e-3, 1e-3)
        assert l == pytest.approx(iv.lower, rel=1e-12)
        assert u == pytest.approx(iv.upper, rel=1e-12)


def test_coverage_is_deterministic():
    a = bernoulli_coverage("improved_chernoff", 1000, 0.3, 0.05, 20_000, seed=5)
    b = bernoulli_coverage("improved_chernoff", 1000, 0.3, 0.05, 20_000, seed=5)
    assert (a.violations_upper, a.violations_lower) == (b.violations_upper, b.violations_lower)


def test_coverage_independent_of_worker_count():
    a = bernoulli_coverage("hoeffding", 500, 0.4, 0.2, 30_000, seed=9, workers=1)
    b = bernoulli_coverage("hoeffding", 500, 0.4, 0.2, 30_000, seed=9, workers=3)
    assert a.as_row() == b.as_row()


def test_zero_probability_never_violates():
    r = bernoulli_coverage("improved_chernoff", 10_000, 0.0, 1e-3, MIN_TRIALS, seed=1)
    assert r.violations_upper == r.violations_lower == 0


def test_loose_eps_detects_violations():
    # eps = 0.5 gives narrow intervals that miss the mean regularly
    r = bernoulli_coverage("improved_chernoff", 10_000, 0.3, 0.5, 10_000, seed=3)
    assert r.violations_upper > 0 and r.violations_lower > 0


def test_mult_chernoff_unmet_draws_are_excluded():
    r = bernoulli_coverage("mult_chernoff", 100, 0.05, 1e-3, MIN_TRIALS, seed=2)
    assert r.conditions_unmet == MIN_TRIALS
    assert r.evaluated == 0


def test_report_threshold_and_text():
    r = bernoulli_coverage("hoeffding", 10_000, 0.3, 1e-3, 10_000, seed=0)
    assert r.threshold == pytest.approx(1e-3 + 3 * (1e-3 / 1e4) ** 0.5)
    assert "PASS" in r.to_text()
    assert r.as_row()["passed"] is True


@pytest.mark.parametrize("kwargs", [dict(trials=10), dict(p=1.5), dict(eps=0.0)])
def test_invalid_requests(kwargs):
    args = dict(model="hoeffding", n=100, p=0.3, eps=1e-3, trials=MIN_TRIALS, seed=0)
    args.update(kwargs)
    with pytest.raises(ValueError):
        bernoulli_coverage(**args)


def test_exact_t_values_constant_matrix():
    Y = np.full((30, 30), 0.2)
    t = exact_t_values(Y, 0.4, 1e-5)
    assert t[0, 1] == pytest.approx(0.2 * np.exp(0.4 + 1e-5), rel=1e-13)
    assert poisson_weights(0.4, 3) == pytest.approx([1, 0.4, 0.08])


def test_sandwich_small_run_passes():
    report = decoy_sandwich_check(random_yield_matrices=50, seed=1)
    assert report.passed and report.checked == 50


def test_sandwich_detects_broken_bound():
    Y = np.random.default_rng(0).random((21, 21))
    assert sandwich_violations(Y, 0.4, 1e-5) == []
    # a large negative tolerance turns every check into a failure
    assert "Y11_up" in sandwich_violations(Y, 0.4, 1e-5, tol=-2.0)
