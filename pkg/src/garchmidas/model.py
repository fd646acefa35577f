"""
GARCH-MIDAS core: short-run GARCH(1,1) filter, total conditional variance,
Gaussian log-likelihood, and a simulator.

Daily returns follow ``r = mu + sqrt(tau_t * g) * eps`` with standard normal
``eps``. The short-run factor obeys

    g_d = (1 - alpha - beta) + alpha * (r_{d-1} - mu)**2 / tau_t + beta * g_{d-1}

where ``tau_t`` is the long-run variance of the month containing day ``d``.
The recursion runs continuously across month boundaries and starts from
``g = 1`` on the first day of the panel.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.signal import lfilter

from garchmidas.data import DailySeries, LowFrequencySeries, MixedPanel, align_panel
from garchmidas.errors import InfeasibleParams, NonPositiveTau
from garchmidas.midas import beta_weights, long_run_component

__all__ = [
    "PARAM_NAMES",
    "ParameterSet",
    "VariancePath",
    "conditional_variance_path",
    "filter_short_run",
    "log_likelihood",
    "CARBON_RV_PARAMS",
    "simulate",
    "simulate_dataset",
    "simulate_regressor",
    "standardized_residuals",
]

PARAM_NAMES = ("mu", "alpha", "beta", "theta", "omega1", "omega2", "m")
LOG_2PI = np.log(2.0 * np.pi)

# full-sample estimates of the realised-volatility model for EU ETS carbon returns
CARBON_RV_PARAMS = dict(mu=0.0006, alpha=0.1221, beta=0.8608, theta=0.1855,
                        omega2=2.8589, m=0.0184)


@dataclass(frozen=True)
class ParameterSet:
    """
    GARCH-MIDAS parameters.

    ``mu`` is the daily mean return; ``alpha`` and ``beta`` drive the
    short-run GARCH factor and must satisfy ``alpha, beta > 0`` and
    ``alpha + beta < 1``; ``m`` and ``theta`` are the intercept and slope of
    the long-run component; ``omega1`` and ``omega2`` shape the Beta lag
    weights (``omega1`` is usually held at 1).
    """

    mu: float
    alpha: float
    beta: float
    theta: float
    omega2: float
    m: float
    omega1: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.alpha + self.beta < 1):
            raise InfeasibleParams(
                f"need alpha > 0, beta > 0, alpha + beta < 1; got alpha={self.alpha}, "
                f"beta={self.beta}"
            )
        if not (self.omega1 >= 1 and self.omega2 >= 1):
            raise InfeasibleParams(
                f"need omega1, omega2 >= 1; got {self.omega1}, {self.omega2}"
            )

    def as_dict(self) -> dict:
        d = asdict(self)
        return {name: float(d[name]) for name in PARAM_NAMES}

    def as_array(self, names=PARAM_NAMES) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)

    @classmethod
    def from_mapping(cls, values) -> "ParameterSet":
        return cls(**{n: float(values[n]) for n in PARAM_NAMES if n in values})

    def with_values(self, **changes) -> "ParameterSet":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class VariancePath:
    """Long-run ``tau`` per period, short-run ``g`` per day, and their product."""

    tau: np.ndarray
    g: np.ndarray
    period_index: np.ndarray

    @property
    def tau_daily(self) -> np.ndarray:
        return self.tau[self.period_index]

    @property
    def variance(self) -> np.ndarray:
        return self.tau_daily * self.g


def _tau(params: ParameterSet, panel: MixedPanel, check=True, link="level"):
    w = beta_weights(panel.n_lags, params.omega1, params.omega2)
    return long_run_component(params.m, params.theta, w, panel.lags, check=check,
                              link=link)


def filter_short_run(params: ParameterSet, panel: MixedPanel, tau) -> np.ndarray:
    """
    Run the short-run GARCH(1,1) recursion over every day of ``panel``.

    Parameters
    ----------
    params : ParameterSet
    panel : MixedPanel
    tau : array_like
        Long-run variance per period; must be strictly positive.

    Returns
    -------
    ndarray
        ``g`` for every day, with ``g = 1`` on the first day.
    """
    tau = np.asarray(tau, dtype=float)
    bad = np.flatnonzero(~(tau > 0))
    if bad.size:
        raise NonPositiveTau(f"tau <= 0 in {bad.size} period(s)", periods=bad)
    n = panel.n_days
    if n == 0:
        raise ValueError("panel has no days")
    a, b = params.alpha, params.beta
    e2 = (panel.returns - params.mu) ** 2
    tau_d = tau[panel.period_index]
    # drive[d] = (1 - a - b) + a * e2[d-1] / tau(d), for d >= 1
    drive = (1.0 - a - b) + a * e2[:-1] / tau_d[1:]
    g = np.empty(n)
    g[0] = 1.0
    if n > 1:
        g[1:], _ = lfilter([1.0], [1.0, -b], drive, zi=[b * g[0]])
    return g


def conditional_variance_path(params: ParameterSet, panel: MixedPanel,
                              link: str = "level") -> VariancePath:
    tau = _tau(params, panel, link=link)
    g = filter_short_run(params, panel, tau)
    return VariancePath(tau, g, panel.period_index)


def log_likelihood(params: ParameterSet, panel: MixedPanel, link: str = "level",
                   per_day: bool = False):
    """
    Gaussian log-likelihood of the panel's returns.

    Returns ``-inf`` when any month has ``tau <= 0`` (or the variance path is
    otherwise not strictly positive and finite), which an optimiser treats as
    an infeasible point. With ``per_day`` the day-level contributions are
    returned instead of their sum.
    """
    tau = _tau(params, panel, check=False, link=link)
    if not np.all(tau > 0):
        return np.full(panel.n_days, -np.inf) if per_day else -np.inf
    g = filter_short_run(params, panel, tau)
    var = tau[panel.period_index] * g
    if not np.all(np.isfinite(var)) or not np.all(var > 0):
        return np.full(panel.n_days, -np.inf) if per_day else -np.inf
    e2 = (panel.returns - params.mu) ** 2
    ll = -0.5 * (LOG_2PI + np.log(var) + e2 / var)
    return ll if per_day else float(ll.sum())


def standardized_residuals(params: ParameterSet, panel: MixedPanel) -> np.ndarray:
    path = conditional_variance_path(params, panel)
    return (panel.returns - params.mu) / np.sqrt(path.variance)


def simulate(params: ParameterSet, regressor_path: LowFrequencySeries,
             days_per_month: int = 22, seed: int = 0,
             n_lags: int = 24) -> tuple[DailySeries, MixedPanel]:
    """
    Draw daily returns from the GARCH-MIDAS data-generating process.

    The first ``n_lags`` months of ``regressor_path`` only seed the lag
    window; one month of ``days_per_month`` trading days is simulated for
    every later month. Day ``d`` of a simulated month is dated on calendar
    day ``d``, so ``days_per_month`` is at most 28.

    Returns
    -------
    (DailySeries, MixedPanel)
        The log-return series and the aligned panel the model consumes.
        The same ``seed`` always gives bit-identical output.
    """
    if not 1 <= days_per_month <= 28:
        raise ValueError("days_per_month must lie in 1..28")
    n_months = len(regressor_path) - n_lags
    if n_months < 1:
        raise ValueError(
            f"regressor path has {len(regressor_path)} months; need more than {n_lags}"
        )
    months = regressor_path.months[n_lags:]
    w = beta_weights(n_lags, params.omega1, params.omega2)
    # lags[t, k-1] = regressor at month t - k
    idx = np.arange(n_lags, len(regressor_path))[:, None] - np.arange(1, n_lags + 1)
    lags = regressor_path.values[idx]
    try:
        tau = long_run_component(params.m, params.theta, w, lags)
    except NonPositiveTau as exc:
        raise InfeasibleParams(f"simulation infeasible: {exc}") from exc

    rng = np.random.default_rng(seed)
    n = n_months * days_per_month
    eps = rng.standard_normal(n)
    period_index = np.repeat(np.arange(n_months), days_per_month)
    tau_d = tau[period_index]
    a, b, mu = params.alpha, params.beta, params.mu
    r = np.empty(n)
    g = 1.0
    for d in range(n):
        if d:
            g = (1.0 - a - b) + a * (r[d - 1] - mu) ** 2 / tau_d[d] + b * g
        r[d] = mu + np.sqrt(tau_d[d] * g) * eps[d]

    day_offsets = np.tile(np.arange(days_per_month), n_months).astype("timedelta64[D]")
    dates = np.repeat(months.astype("datetime64[D]"), days_per_month) + day_offsets
    daily = DailySeries(dates, r, "log_return")
    panel = align_panel(daily, regressor_path, n_lags)
    return daily, panel


def simulate_regressor(start, n_months: int, mean: float = 1.0,
                       persistence: float = 0.9, cv: float = 0.3, seed: int = 0,
                       label: str = "x") -> LowFrequencySeries:
    """
    Positive monthly regressor: a log-normal AR(1) with the given mean,
    first-order autocorrelation of the log, and coefficient of variation.
    """
    rng = np.random.default_rng(seed)
    s2 = np.log1p(cv**2)
    innov_sd = np.sqrt(s2 * (1.0 - persistence**2))
    z = np.empty(n_months)
    z[0] = rng.standard_normal() * np.sqrt(s2)
    shocks = rng.standard_normal(n_months) * innov_sd
    for t in range(1, n_months):
        z[t] = persistence * z[t - 1] + shocks[t]
    values = mean * np.exp(z - 0.5 * s2)
    first = np.datetime64(start, "M")
    return LowFrequencySeries(first + np.arange(n_months), values, label)


def _child_seeds(seed, n):
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


def simulate_dataset(params: ParameterSet, n_months: int, days_per_month: int = 22,
                     n_lags: int = 24, seed: int = 0, start="2008-01",
                     regressor_mean: float = 1.0, regressor_persistence: float = 0.98,
                     regressor_cv: float = 2.0, label: str = "X"):
    """
    Simulate a log-normal AR(1) regressor and daily returns driven by it.

    The regressor covers ``n_lags`` months of history before ``start``
    followed by ``n_months`` modelled months. Independent streams for the
    regressor and the returns are derived from ``seed``.

    Returns
    -------
    (DailySeries, LowFrequencySeries, MixedPanel)
    """
    reg_seed, ret_seed = _child_seeds(seed, 2)
    first = np.datetime64(start, "M") - n_lags
    x = simulate_regressor(first, n_months + n_lags, mean=regressor_mean,
                           persistence=regressor_persistence, cv=regressor_cv,
                           seed=reg_seed, label=label)
    daily, panel = simulate(params, x, days_per_month, ret_seed, n_lags)
    return daily, x, panel
