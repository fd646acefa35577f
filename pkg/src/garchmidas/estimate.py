"""
Maximum-likelihood estimation of GARCH-MIDAS parameters.

The optimiser works on an unconstrained vector:

* ``alpha, beta`` through a three-way softmax, so ``alpha, beta > 0`` and
  ``alpha + beta < 1`` always hold;
* ``omega = 1 + exp(z)``;
* ``mu, theta, m`` linearly rescaled to order one.

Positivity of the long-run component is not built into the transform; the
likelihood returns ``-inf`` at infeasible points instead. The search is a
Nelder-Mead simplex from the best few points of a start grid, followed by
simplex restarts until the likelihood stops improving.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from garchmidas.data import MixedPanel
from garchmidas.errors import (
    InfeasibleParams,
    NoFeasibleStart,
    NonConvergence,
    SingularHessian,
)
from garchmidas.model import PARAM_NAMES, ParameterSet, log_likelihood

__all__ = [
    "FitResult",
    "OptimizerOptions",
    "ParameterTransform",
    "aic",
    "fit",
    "numerical_hessian",
    "significance_stars",
    "standard_errors",
]

START_GRID = {
    "alpha": (0.05, 0.1, 0.2),
    "beta": (0.7, 0.85, 0.9),
    "omega2": (1.5, 3.0, 10.0),
}
FIXABLE = {"mu", "theta", "omega1", "omega2", "m"}


def aic(log_lik: float, k: int) -> float:
    """Akaike information criterion ``2k - 2 log_lik``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2.0 * k - 2.0 * log_lik


def significance_stars(t_stat) -> str:
    if t_stat is None or not np.isfinite(t_stat):
        return ""
    t = abs(t_stat)
    if t >= 2.5758293035489004:
        return "***"
    if t >= 1.959963984540054:
        return "**"
    if t >= 1.6448536269514722:
        return "*"
    return ""


@dataclass
class OptimizerOptions:
    """Settings for :func:`fit`."""

    max_iter: int = 5000
    rel_ll_tol: float = 1e-9
    simplex_tol: float = 1e-7
    n_refine: int = 3
    max_polish: int = 5
    strict: bool = False
    compute_se: bool = True
    link: str = "level"

    @classmethod
    def from_mapping(cls, values) -> "OptimizerOptions":
        known = cls.__dataclass_fields__
        return cls(**{k: v for k, v in dict(values or {}).items() if k in known})


class ParameterTransform:
    """Map between :class:`ParameterSet` and the optimiser's unconstrained vector."""

    def __init__(self, free, fixed=None, scales=None):
        self.free = tuple(n for n in PARAM_NAMES if n in free)
        self.fixed = dict(fixed or {})
        self.scales = {"mu": 1.0, "theta": 1.0, "m": 1.0}
        self.scales.update(scales or {})
        if ("alpha" in self.free) != ("beta" in self.free):
            raise ValueError("alpha and beta are estimated jointly")

    def to_unconstrained(self, params: ParameterSet) -> np.ndarray:
        z = []
        rest = 1.0 - params.alpha - params.beta
        for name in self.free:
            if name == "alpha":
                z.append(math.log(params.alpha / rest))
            elif name == "beta":
                z.append(math.log(params.beta / rest))
            elif name in ("omega1", "omega2"):
                # a start on the boundary omega = 1 maps to a large negative z
                z.append(math.log(max(getattr(params, name) - 1.0, 1e-12)))
            else:
                z.append(getattr(params, name) / self.scales[name])
        return np.array(z)

    def values(self, z) -> dict:
        vals = dict(self.fixed)
        pos = dict(zip(self.free, z))
        if "alpha" in pos:
            za, zb = pos["alpha"], pos["beta"]
            top = max(za, zb, 0.0)
            ea, eb, e0 = math.exp(za - top), math.exp(zb - top), math.exp(-top)
            denom = e0 + ea + eb
            vals["alpha"], vals["beta"] = ea / denom, eb / denom
        for name in ("omega1", "omega2"):
            if name in pos:
                vals[name] = 1.0 + math.exp(min(pos[name], 700.0))
        for name in ("mu", "theta", "m"):
            if name in pos:
                vals[name] = pos[name] * self.scales[name]
        return vals

    def to_params(self, z) -> ParameterSet:
        return ParameterSet.from_mapping(self.values(z))


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Estimated parameters with standard errors and fit statistics.

    ``std_errors`` and ``t_stats`` hold ``nan`` for fixed parameters and
    when the Hessian could not be inverted (``se_available`` is then false).
    """

    params: ParameterSet
    free: tuple
    std_errors: dict
    t_stats: dict
    log_lik: float
    aic: float
    n_obs: int
    converged: bool
    n_iterations: int
    regressor: str
    n_lags: int
    sample_start: str
    sample_end: str
    fixed: dict = field(default_factory=dict)
    se_available: bool = False
    message: str = ""
    trace: tuple = ()
    start_log_liks: tuple = ()

    @property
    def k(self) -> int:
        return len(self.free)

    def to_dict(self) -> dict:
        rows = []
        for name in PARAM_NAMES:
            value = getattr(self.params, name)
            se = self.std_errors.get(name, math.nan)
            t = self.t_stats.get(name, math.nan)
            rows.append({
                "name": name,
                "value": value,
                "std_error": _clean(se),
                "t_stat": _clean(t),
                "stars": significance_stars(t),
                "fixed": name not in self.free,
            })
        return {
            "model": f"GARCH-MIDAS-{self.regressor}",
            "regressor": self.regressor,
            "n_lags": self.n_lags,
            "sample": {"start": self.sample_start, "end": self.sample_end},
            "parameters": rows,
            "log_likelihood": self.log_lik,
            "aic": self.aic,
            "k": self.k,
            "n_obs": self.n_obs,
            "converged": self.converged,
            "n_iterations": self.n_iterations,
            "se_available": self.se_available,
            "message": self.message,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d) -> "FitResult":
        rows = {r["name"]: r for r in d["parameters"]}
        params = ParameterSet.from_mapping({n: rows[n]["value"] for n in rows})
        free = tuple(n for n in PARAM_NAMES if not rows[n]["fixed"])
        return cls(
            params=params,
            free=free,
            std_errors={n: _unclean(rows[n]["std_error"]) for n in free},
            t_stats={n: _unclean(rows[n]["t_stat"]) for n in free},
            log_lik=d["log_likelihood"],
            aic=d["aic"],
            n_obs=d["n_obs"],
            converged=d["converged"],
            n_iterations=d["n_iterations"],
            regressor=d["regressor"],
            n_lags=d["n_lags"],
            sample_start=d["sample"]["start"],
            sample_end=d["sample"]["end"],
            fixed={n: rows[n]["value"] for n in PARAM_NAMES if rows[n]["fixed"]},
            se_available=d.get("se_available", False),
            message=d.get("message", ""),
        )

    @classmethod
    def from_json(cls, text) -> "FitResult":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [
            f"GARCH-MIDAS-{self.regressor}   sample {self.sample_start} .. "
            f"{self.sample_end}   K={self.n_lags}",
            f"{'Para.':<8}{'Val.':>14}{'Std.':>14}{'t stat.':>12}",
        ]
        for name in PARAM_NAMES:
            value = getattr(self.params, name)
            if name not in self.free:
                lines.append(f"{name:<8}{value:>14.6g}{'(fixed)':>14}{'':>12}")
                continue
            se, t = self.std_errors.get(name, math.nan), self.t_stats.get(name, math.nan)
            t_txt = f"{t:.2f}{significance_stars(t)}" if np.isfinite(t) else "n/a"
            se_txt = f"{se:.4g}" if np.isfinite(se) else "n/a"
            lines.append(f"{name:<8}{value:>14.6g}{se_txt:>14}{t_txt:>12}")
        lines.append(f"{'LogL':<8}{self.log_lik:>14.4f}")
        lines.append(f"{'AIC':<8}{self.aic:>14.4f}")
        lines.append(f"{'n_obs':<8}{self.n_obs:>14d}")
        lines.append(f"converged={self.converged}  iterations={self.n_iterations}")
        return "\n".join(lines) + "\n"


def _clean(x):
    return None if x is None or not np.isfinite(x) else float(x)


def _unclean(x):
    return math.nan if x is None else float(x)


# ---------------------------------------------------------------------------
# Starting values


def _monthly_variance_regression(panel: MixedPanel):
    """OLS of monthly mean squared demeaned return on the flat-weighted regressor."""
    e2 = (panel.returns - panel.returns.mean()) ** 2
    counts = panel.days_per_period
    y = np.bincount(panel.period_index, weights=e2, minlength=panel.n_periods) / counts
    x = panel.lags.mean(axis=1)
    if panel.n_periods >= 3 and np.ptp(x) > 0:
        slope, intercept = np.polyfit(x, y, 1)
    else:
        slope, intercept = 0.0, float(y.mean())
    return float(intercept), float(slope), float(y.mean()), float(abs(x).mean())


def _scales(panel: MixedPanel, link: str):
    sd = float(panel.returns.std())
    var = sd**2
    xbar = float(abs(panel.lags).mean())
    if link == "exp":
        return {"mu": max(0.1 * sd, 1e-12), "theta": 1.0 / max(xbar, 1e-12), "m": 1.0}
    return {
        "mu": max(0.1 * sd, 1e-12),
        "theta": max(var, 1e-300) / max(xbar, 1e-12),
        "m": max(var, 1e-300),
    }


def _candidate_starts(panel: MixedPanel, free, fixed, link):
    intercept, slope, ybar, _ = _monthly_variance_regression(panel)
    mu0 = float(panel.returns.mean())
    if link == "exp":
        long_run = [(math.log(ybar) if ybar > 0 else -50.0, 0.0)]
    else:
        long_run = [(intercept, slope), (ybar, 0.0)]
    grid = [START_GRID["alpha"], START_GRID["beta"], START_GRID["omega2"]]
    starts = []
    for (a, b, w2), (m0, th0) in itertools.product(itertools.product(*grid), long_run):
        if a + b >= 1:
            continue
        vals = {"mu": mu0, "alpha": a, "beta": b, "theta": th0,
                "omega1": 1.0 if "omega1" in fixed else 1.5,
                "omega2": w2, "m": m0}
        if "theta" in fixed and "m" not in fixed and link == "level":
            vals["m"] = ybar - fixed["theta"] * panel.lags.mean()
        vals.update(fixed)
        starts.append(ParameterSet.from_mapping(vals))
    return starts


# ---------------------------------------------------------------------------
# Optimisation


def _nelder_mead(objective, z0, opts: OptimizerOptions, step, budget, trace):
    n = z0.size
    simplex = np.vstack([z0, z0 + step * np.eye(n)])
    f0 = objective(z0)
    fatol = opts.rel_ll_tol * max(abs(f0), 1.0) if np.isfinite(f0) else opts.rel_ll_tol

    def callback(intermediate_result):
        trace.append(-float(intermediate_result.fun))

    res = minimize(
        objective,
        z0,
        method="Nelder-Mead",
        callback=callback,
        options={
            "initial_simplex": simplex,
            "xatol": opts.simplex_tol,
            "fatol": fatol,
            "maxiter": budget,
            "maxfev": 4 * budget,
            "adaptive": n > 4,
        },
    )
    return res


def fit(panel: MixedPanel, fix_omega1: bool = True, start: ParameterSet | None = None,
        options: OptimizerOptions | dict | None = None,
        fixed: dict | None = None) -> FitResult:
    """
    Estimate GARCH-MIDAS parameters by maximum likelihood.

    Parameters
    ----------
    panel : MixedPanel
        Aligned daily returns and lagged regressor values.
    fix_omega1 : bool, default True
        Hold ``omega1`` at 1 (one-parameter decaying Beta weights).
    start : ParameterSet, optional
        Single starting point; the default start grid is used otherwise.
    options : OptimizerOptions or dict, optional
    fixed : dict, optional
        Parameters held at given values, e.g. ``{"theta": 0.0, "omega2": 1.0}``
        for the nested constant long-run variance model.

    Returns
    -------
    FitResult

    Raises
    ------
    NoFeasibleStart
        No candidate start has a positive long-run component in every month.
    NonConvergence
        Only when ``options.strict`` is set; otherwise ``converged`` is false.
    """
    opts = options if isinstance(options, OptimizerOptions) else \
        OptimizerOptions.from_mapping(options)
    fixed = dict(fixed or {})
    if fix_omega1:
        fixed.setdefault("omega1", 1.0)
    bad = set(fixed) - FIXABLE
    if bad:
        raise ValueError(f"cannot fix {sorted(bad)}")
    free = tuple(n for n in PARAM_NAMES if n not in fixed)
    transform = ParameterTransform(free, fixed, _scales(panel, opts.link))

    def loglik(params):
        return log_likelihood(params, panel, link=opts.link)

    def objective(z):
        try:
            ll = loglik(transform.to_params(z))
        except (InfeasibleParams, OverflowError, FloatingPointError):
            return np.inf
        return -ll if np.isfinite(ll) else np.inf

    if np.ptp(panel.returns) == 0:
        raise NoFeasibleStart("returns are constant; the variance is not identified")
    if start is not None:
        starts = [ParameterSet.from_mapping({**start.as_dict(), **fixed})]
    else:
        starts = _candidate_starts(panel, free, fixed, opts.link)
    start_lls = [loglik(s) for s in starts]
    order = [i for i in np.argsort(start_lls)[::-1] if np.isfinite(start_lls[i])]
    if not order:
        raise NoFeasibleStart(
            f"none of {len(starts)} starting points gives tau > 0 in every month"
        )

    trace: list[float] = []
    best = None
    n_iter = 0
    for i in order[: max(opts.n_refine, 1)]:
        res = _nelder_mead(objective, transform.to_unconstrained(starts[i]), opts,
                           0.2, opts.max_iter, trace)
        n_iter += res.nit
        if best is None or res.fun < best.fun:
            best = res

    # polish: restart the simplex around the incumbent until no gain
    converged = bool(best.success)
    for _ in range(opts.max_polish):
        res = _nelder_mead(objective, best.x, opts, 0.05, opts.max_iter, trace)
        n_iter += res.nit
        gain = best.fun - res.fun
        if res.fun <= best.fun:
            best = res
        if gain <= opts.rel_ll_tol * max(abs(best.fun), 1.0):
            converged = bool(res.success)
            break
    else:
        converged = False

    # running best, so the trace reflects the incumbent across restarts
    trace = tuple(np.maximum.accumulate(trace)) if trace else ()

    params = transform.to_params(best.x)
    ll = loglik(params)
    message = "" if converged else "optimizer did not meet the convergence tolerances"
    if not converged and opts.strict:
        raise NonConvergence(message)

    result = FitResult(
        params=params,
        free=free,
        std_errors={n: math.nan for n in free},
        t_stats={n: math.nan for n in free},
        log_lik=float(ll),
        aic=aic(ll, len(free)),
        n_obs=panel.n_days,
        converged=converged,
        n_iterations=int(n_iter),
        regressor=panel.regressor,
        n_lags=panel.n_lags,
        sample_start=str(panel.months[0]),
        sample_end=str(panel.months[-1]),
        fixed=fixed,
        message=message,
        trace=trace,
        start_log_liks=tuple(float(v) for v in start_lls),
    )
    if not opts.compute_se:
        return result
    try:
        se = standard_errors(result, panel, link=opts.link)
    except SingularHessian as exc:
        return replace(result, message=(message + "; " if message else "") + str(exc))
    t = {n: getattr(params, n) / se[n] for n in free}
    return replace(result, std_errors=se, t_stats=t, se_available=True)


# ---------------------------------------------------------------------------
# Standard errors


def numerical_hessian(f, x, steps) -> np.ndarray:
    """Central finite-difference Hessian of scalar ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(steps, dtype=float)
    n = x.size
    f0 = f(x)
    H = np.empty((n, n))
    E = np.diag(h)
    for i in range(n):
        H[i, i] = (f(x + E[i]) - 2.0 * f0 + f(x - E[i])) / h[i] ** 2
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (
                f(x + E[i] + E[j]) - f(x + E[i] - E[j])
                - f(x - E[i] + E[j]) + f(x - E[i] - E[j])
            ) / (4.0 * h[i] * h[j])
    return H


def covariance_from_hessian(H) -> np.ndarray:
    """Inverse of the negative Hessian; raises if it is not positive definite."""
    neg = -0.5 * (H + H.T)
    if not np.all(np.isfinite(neg)):
        raise SingularHessian("Hessian has non-finite entries")
    eig = np.linalg.eigvalsh(neg)
    if eig[-1] <= 0 or eig[0] <= 1e-10 * eig[-1]:
        raise SingularHessian(
            f"negative Hessian is singular or indefinite (eigenvalues "
            f"{eig[0]:.3g} .. {eig[-1]:.3g})"
        )
    return np.linalg.inv(neg)


def _hessian_steps(params: ParameterSet, free, panel: MixedPanel):
    sd = float(panel.returns.std()) or 1.0
    xbar = float(abs(panel.lags).mean()) or 1.0
    floors = {"mu": sd, "alpha": 1.0, "beta": 1.0, "theta": sd**2 / xbar,
              "omega1": 1.0, "omega2": 1.0, "m": sd**2}
    rel = np.finfo(float).eps ** 0.25
    slack = 1.0 - params.alpha - params.beta
    steps = []
    for n in free:
        v = getattr(params, n)
        h = rel * max(abs(v), floors[n] * 1e-2)
        if n in ("alpha", "beta"):
            h = min(h, 0.25 * min(slack, v))
        elif n in ("omega1", "omega2"):
            h = min(h, 0.25 * (v - 1.0)) if v > 1.0 else 0.0
        steps.append(h)
    return np.array(steps)


def standard_errors(fit: FitResult, panel: MixedPanel, link: str = "level") -> dict:
    """
    Standard errors from the inverse of the negative Hessian of the
    log-likelihood, taken by central differences in the original parameter
    space.

    Raises
    ------
    SingularHessian
        The Hessian is singular or not negative definite (e.g. an
        unidentified parameter), or a parameter sits on its boundary.
    """
    free = fit.free
    base = fit.params.as_dict()
    steps = _hessian_steps(fit.params, free, panel)
    if np.any(steps <= 0):
        at = [n for n, h in zip(free, steps) if h <= 0]
        raise SingularHessian(f"parameters on the boundary: {at}")

    def f(x):
        vals = dict(base)
        vals.update(zip(free, x))
        try:
            return log_likelihood(ParameterSet.from_mapping(vals), panel, link=link)
        except InfeasibleParams:
            return -np.inf

    H = numerical_hessian(f, fit.params.as_array(free), steps)
    cov = covariance_from_hessian(H)
    return {n: float(np.sqrt(cov[i, i])) for i, n in enumerate(free)}
