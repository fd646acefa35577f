import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from garchmidas.data import DailySeries, LowFrequencySeries, align_panel
from garchmidas.errors import InfeasibleParams, NonPositiveTau
from garchmidas.model import (
    ParameterSet,
    conditional_variance_path,
    filter_short_run,
    log_likelihood,
    simulate,
    simulate_dataset,
    simulate_regressor,
    standardized_residuals,
)


def _panel(returns, per_month, lag_values=None, n_lags=1):
    returns = np.asarray(returns, dtype=float)
    n_months = returns.size // per_month
    months = np.datetime64("2010-01", "M") + np.arange(n_months)
    dates = np.repeat(months.astype("datetime64[D]"), per_month) + np.tile(
        np.arange(per_month), n_months).astype("timedelta64[D]")
    reg_months = np.datetime64("2010-01", "M") - n_lags + np.arange(n_months + n_lags)
    if lag_values is None:
        lag_values = np.ones(reg_months.size)
    reg = LowFrequencySeries(reg_months, lag_values, "X")
    return align_panel(DailySeries(dates, returns, "log_return"), reg, n_lags)


def _loop_filter(params, panel, tau):
    g = np.empty(panel.n_days)
    g[0] = 1.0
    a, b = params.alpha, params.beta
    for d in range(1, panel.n_days):
        e2 = (panel.returns[d - 1] - params.mu) ** 2
        g[d] = (1 - a - b) + a * e2 / tau[panel.period_index[d]] + b * g[d - 1]
    return g


@pytest.mark.parametrize("kw", [dict(alpha=0.5, beta=0.5), dict(alpha=0.0, beta=0.5),
                                dict(alpha=0.1, beta=0.9, omega2=0.5)])
def test_parameter_constraints(kw):
    base = dict(mu=0.0, alpha=0.1, beta=0.8, theta=0.0, omega2=1.0, m=1.0)
    base.update(kw)
    with pytest.raises(InfeasibleParams):
        ParameterSet(**base)


def test_single_observation_loglik():
    panel = _panel([0.0], 1)
    p = ParameterSet(mu=0.0, alpha=0.01, beta=0.01, theta=0.0, omega2=1.0, m=1.0)
    assert abs(log_likelihood(p, panel) - (-0.9189385)) < 1e-7
    assert log_likelihood(p, panel) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)


def test_filter_matches_loop(small_sample, carbon_params):
    _, _, panel = small_sample
    path = conditional_variance_path(carbon_params, panel)
    assert_allclose(path.g, _loop_filter(carbon_params, panel, path.tau), rtol=1e-12)
    assert_array_equal(path.variance, path.tau[panel.period_index] * path.g)
    assert np.all(path.g > 0)


def test_filter_closed_form_when_returns_equal_mu():
    mu, a, b = 0.01, 0.1, 0.8
    panel = _panel(np.full(40, mu), 10)
    p = ParameterSet(mu=mu, alpha=a, beta=b, theta=0.0, omega2=1.0, m=2.0)
    g = filter_short_run(p, panel, np.full(4, 2.0))
    i = np.arange(1, 41)
    expected = (1 - a - b) * (1 - b ** (i - 1)) / (1 - b) + b ** (i - 1) * 1.0
    assert_allclose(g, expected, rtol=1e-13)


def test_filter_small_alpha_beta_collapses():
    panel = _panel(np.random.default_rng(0).normal(size=30), 10)
    p = ParameterSet(mu=0.0, alpha=1e-12, beta=1e-12, theta=0.0, omega2=1.0, m=1.0)
    g = filter_short_run(p, panel, np.ones(3))
    assert_allclose(g[1:], 1.0, atol=1e-10)


def test_filter_rejects_nonpositive_tau():
    panel = _panel(np.zeros(4), 2)
    p = ParameterSet(mu=0.0, alpha=0.1, beta=0.8, theta=0.0, omega2=1.0, m=1.0)
    with pytest.raises(NonPositiveTau):
        filter_short_run(p, panel, [1.0, 0.0])


def test_constant_variance_limit():
    panel = _panel(np.random.default_rng(1).normal(size=60), 20, n_lags=2)
    p = ParameterSet(mu=0.0, alpha=1e-12, beta=1e-12, theta=0.0, omega2=1.0, m=0.7)
    assert_allclose(conditional_variance_path(p, panel).variance, 0.7, rtol=1e-10)


def test_infeasible_point_gives_sentinel():
    panel = _panel(np.zeros(6), 2, lag_values=[1.0, 1.0, -5.0, 1.0])
    p = ParameterSet(mu=0.0, alpha=0.1, beta=0.8, theta=1.0, omega2=1.0, m=1.0)
    assert log_likelihood(p, panel) == -np.inf
    assert np.all(log_likelihood(p, panel, per_day=True) == -np.inf)


def test_loglik_decomposes_over_splits(small_sample, carbon_params):
    _, _, panel = small_sample
    per_day = log_likelihood(carbon_params, panel, per_day=True)
    total = log_likelihood(carbon_params, panel)
    for cut in (1, 137, panel.n_days // 2, panel.n_days - 1):
        assert per_day[:cut].sum() + per_day[cut:].sum() == pytest.approx(total, rel=1e-13)

    path = conditional_variance_path(carbon_params, panel)
    var = path.variance
    e2 = (panel.returns - carbon_params.mu) ** 2
    direct = -0.5 * (np.log(2 * np.pi) + np.log(var) + e2 / var)
    assert_allclose(per_day, direct, rtol=1e-14)


def test_filter_has_no_future_dependence(small_sample, carbon_params):
    _, _, panel = small_sample
    g = conditional_variance_path(carbon_params, panel).g
    for months in (1, 7, 30):
        head = panel.select(panel.months[0], panel.months[months - 1])
        g_head = conditional_variance_path(carbon_params, head).g
        assert_array_equal(g_head, g[: head.n_days])


@pytest.mark.parametrize("c", [0.01, 3.0, 250.0])
def test_scale_consistency(small_sample, carbon_params, c):
    daily, x, panel = small_sample
    z = standardized_residuals(carbon_params, panel)
    scaled_daily = DailySeries(daily.dates, c * daily.values, "log_return")
    scaled_panel = align_panel(scaled_daily, x, panel.n_lags)
    p = carbon_params.with_values(mu=c * carbon_params.mu, m=c**2 * carbon_params.m,
                                  theta=c**2 * carbon_params.theta)
    assert_allclose(standardized_residuals(p, scaled_panel), z, rtol=0, atol=1e-10)
    ll = log_likelihood(carbon_params, panel)
    assert log_likelihood(p, scaled_panel) == pytest.approx(ll - panel.n_days * math.log(c),
                                                            rel=1e-11)


def test_mean_g_near_one_moderate_persistence():
    p = ParameterSet(mu=0.0, alpha=0.05, beta=0.90, theta=0.1855, omega2=2.8589, m=0.0184)
    _, _, panel = simulate_dataset(p, 4600, 22, 24, seed=3)
    assert panel.n_days > 100_000
    g = conditional_variance_path(p, panel).g
    assert abs(g.mean() - 1.0) < 0.05


@pytest.mark.slow
def test_mean_g_near_one_reference_point(carbon_params):
    # (alpha + beta)**2 + 2 alpha**2 = 0.996 here, so g has a barely finite
    # variance and one 1e5-day path is too noisy; pool ten of them
    means = []
    for seed in range(10):
        _, _, panel = simulate_dataset(carbon_params, 4600, 22, 24, seed=seed)
        means.append(conditional_variance_path(carbon_params, panel).g.mean())
    assert abs(np.mean(means) - 1.0) < 0.05


def test_mean_variance_matches_return_variance(carbon_sample, carbon_params):
    daily, _, panel = carbon_sample
    var = conditional_variance_path(carbon_params, panel).variance
    assert abs(var.mean() / daily.values.var(ddof=1) - 1) < 0.10


@pytest.mark.slow
def test_constant_regressor_moment(carbon_params):
    months = np.datetime64("2006-01", "M") + np.arange(524)
    x = LowFrequencySeries(months, np.full(524, 0.1), "X")
    tau = carbon_params.m + carbon_params.theta * 0.1
    ratios = []
    for seed in range(10):
        daily, panel = simulate(carbon_params, x, 22, seed=seed)
        assert panel.n_days == 11_000
        ratios.append(daily.values.var(ddof=1) / tau)
    assert abs(np.mean(ratios) - 1) < 0.10


def test_simulate_is_deterministic(carbon_params):
    x = simulate_regressor("2000-01", 40, seed=1)
    a, pa = simulate(carbon_params, x, 22, seed=9)
    b, pb = simulate(carbon_params, x, 22, seed=9)
    c, _ = simulate(carbon_params, x, 22, seed=10)
    assert a == b
    assert_array_equal(pa.lags, pb.lags)
    assert not np.array_equal(a.values, c.values)
    assert len(a) == 16 * 22


def test_simulate_degenerate_variance():
    p = ParameterSet(mu=5.0, alpha=1e-12, beta=1e-12, theta=0.0, omega2=1.0, m=1e-40)
    x = simulate_regressor("2000-01", 30, seed=0)
    daily, _ = simulate(p, x, 5, seed=0)
    assert_array_equal(daily.values, 5.0)


def test_simulate_infeasible():
    p = ParameterSet(mu=0.0, alpha=0.1, beta=0.8, theta=-1.0, omega2=1.0, m=0.1)
    x = simulate_regressor("2000-01", 30, mean=1.0, seed=0)
    with pytest.raises(InfeasibleParams):
        simulate(p, x, 5, seed=0)


def test_simulated_panel_matches_regressor(carbon_sample):
    daily, x, panel = carbon_sample
    assert panel.n_periods == 500
    assert panel.n_days == len(daily) == 11_000
    assert_array_equal(panel.lags[0], x.values[23::-1])
