import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from sparsecc import analysis as A
from sparsecc import experiments as E
from sparsecc.validate import exact_error_prob


def small_config(**kw) -> E.ExperimentConfig:
    base = dict(n=200, k=5, nu_list=(2.0,), alpha_list=(0.03,), inv_gamma_list=(2.5,), trials=10, master_seed=3)
    return E.ExperimentConfig(**(base | kw))


def test_measurement_count_uses_natural_log():
    assert E.measurement_count(2.0, 10, 10_000, 0.01) == math.ceil(20 * math.log(1e6))
    assert E.measurement_count(1.0, 1, 1, 1 / math.e) == 1


def test_lower_median():
    assert E.lower_median([3.0]) == 3.0
    assert E.lower_median([4.0, 1.0, 3.0, 2.0]) == 2.0
    assert E.lower_median([5.0, 1.0, 3.0]) == 3.0


@pytest.mark.parametrize("bad", [
    dict(k=0), dict(k=300), dict(trials=0), dict(alpha_list=(1.0,)), dict(alpha_list=()),
    dict(inv_gamma_list=(0.5,)), dict(inv_gamma_list=(6,)), dict(nu_list=(0.0,)),
    dict(delta=1.0), dict(epsilon=0.0), dict(signal_kind="dense"),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        small_config(**bad)


def test_cells_order():
    c = small_config(alpha_list=(0.1, 0.2), inv_gamma_list=(1, 2), nu_list=(1.0, 2.0))
    assert c.cells()[:3] == [(0.1, 1, 1.0), (0.1, 1, 2.0), (0.1, 2, 1.0)]
    assert len(c.cells()) == 8


def test_well_sampled_cell_recovers_exactly():
    c = small_config()
    results = [E.run_trial(c, 0.03, 2.5, 2.0, t) for t in range(100)]
    assert sum(r.normalized_error <= 1e-6 for r in results) >= 90
    assert all(r.min_excess >= 0 for r in results)


def test_undersampled_cell_fails():
    (cell,) = E.run_experiment(small_config(nu_list=(0.1,), trials=21))
    assert cell.m == 5
    assert cell.median_error > 1.0 and cell.failure_rate == 1.0


def test_single_trial_cell_matches_run_trial():
    c = small_config(trials=1, alpha_list=(0.2,), inv_gamma_list=(1,), nu_list=(0.8,))
    (cell,) = E.run_experiment(c)
    t = E.run_trial(c, 0.2, 1, 0.8, 0)
    assert cell.median_error == t.normalized_error
    assert cell.failure_rate == float(t.any_failure)
    assert cell.mean_uncovered == t.uncovered_count
    assert cell.trials == 1 and cell.seed == 3


def test_cell_results_do_not_depend_on_grid_order():
    a = small_config(alpha_list=(0.05, 0.4), inv_gamma_list=(1, 3), nu_list=(0.5, 1.0), trials=4)
    b = replace(a, alpha_list=(0.4, 0.05), inv_gamma_list=(3, 1), nu_list=(1.0, 0.5))
    key = lambda r: (r.alpha, r.inv_gamma, r.nu)  # noqa: E731
    assert sorted(E.run_experiment(a), key=key) == sorted(E.run_experiment(b), key=key)


def test_extending_grid_keeps_existing_cells():
    a = small_config(alpha_list=(0.1,), trials=4)
    b = replace(a, alpha_list=(0.1, 0.6))
    assert E.run_experiment(a)[0] == E.run_experiment(b)[0]


def test_thread_count_does_not_change_results():
    c = small_config(alpha_list=(0.05, 0.5), inv_gamma_list=(1, 5), nu_list=(0.6,), trials=6)
    assert E.run_experiment(c, workers=1) == E.run_experiment(c, workers=4)


def test_signals_are_shared_across_cells():
    c = small_config()
    assert E.trial_signal(c, 2) == E.trial_signal(c, 2)
    assert E.trial_design(c, 0.1, 1, 1.0, 2).master_seed != E.trial_design(c, 0.2, 1, 1.0, 2).master_seed


def test_mean_uncovered_matches_binomial():
    c = small_config(nu_list=(0.1,), trials=60, inv_gamma_list=(2.5,))
    (cell,) = E.run_experiment(c)
    p = (1 - 0.4) ** cell.m
    sd = math.sqrt(c.n * p * (1 - p) / c.trials)
    assert abs(cell.mean_uncovered - c.n * p) < 3 * sd


def test_failure_rate_at_exact_coefficient():
    gamma, delta = 0.4, 0.01
    coef = A.measurements_alpha0(A.ComplexityQuery(5, 200, delta, gamma=gamma)).coefficient
    c = small_config(nu_list=(coef / 5,), trials=300, master_seed=4, delta=delta)
    (cell,) = E.run_experiment(c)
    assert cell.failure_rate <= delta + 3 * math.sqrt(delta * (1 - delta) / c.trials)


def test_empirical_error_prob_rejects_empty_design():
    with pytest.raises(ValueError):
        E.empirical_error_prob(20, 1, 1.0, 0.03, 0, 0.5, 10, 0)


def test_empirical_error_prob_dense_single_spike():
    r = E.empirical_error_prob(20, 1, 1.0, 0.03, 5, 0.5, 4000, 11)
    assert abs(r.rate_zero_coords - exact_error_prob(1, 1.0, 5, 0.5, 0.03, True)) < 3 * r.stderr_zero
    assert r.uncovered_zero == 0.0
    # the support coordinate is recovered exactly whenever gamma = 1 and K = 1
    assert r.rate_support_coords == 0.0


@pytest.mark.parametrize("m", [10, 20, 40])
def test_empirical_error_prob_matches_exact(m):
    # exact binomial test at the two-sided 3-sigma level; at M = 40 the expected
    # failure counts are below one, where a normal band is meaningless
    r = E.empirical_error_prob(50, 3, 0.4, 0.03, m, 0.5, 3000, 17)
    for zero, obs, n in ((True, r.rate_zero_coords, r.n_zero), (False, r.rate_support_coords, r.n_support)):
        p = exact_error_prob(3, 0.4, m, 0.5, 0.03, zero)
        assert stats.binomtest(round(obs * n), n, p).pvalue > 0.0027


def test_uncovered_counts_as_failure():
    # with M = 1 and gamma = 0.4 most coordinates have no surviving entry
    r = E.empirical_error_prob(50, 3, 0.4, 0.03, 1, 0.5, 500, 2)
    assert r.uncovered_zero > 0.5
    assert r.rate_zero_coords >= r.uncovered_zero


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**40), st.sampled_from([1, 2, 5]))
def test_trials_are_one_sided(seed, inv_gamma):
    c = small_config(master_seed=seed, nu_list=(0.5,), inv_gamma_list=(inv_gamma,), signal_kind="binary")
    for t in range(3):
        assert E.run_trial(c, 0.1, inv_gamma, 0.5, t).min_excess >= 0
