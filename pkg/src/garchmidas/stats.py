"""
Descriptive statistics, the Jarque-Bera normality test and the augmented
Dickey-Fuller unit-root test.

Skewness and kurtosis use central moments with an ``n`` denominator;
kurtosis is reported in raw (non-excess) form, so a normal sample gives
about 3. The standard deviation uses ``n - 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats as sps
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from garchmidas.errors import SingularRegression, SkewUndefinedWarning, TooFewObservations

__all__ = [
    "DescriptiveStats",
    "TestResult",
    "adf_test",
    "describe",
    "jarque_bera",
    "summary_table",
]

ADF_SPECS = {"none": "n", "constant": "c", "constant_trend": "ct"}


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    median: float
    max: float
    min: float
    std_dev: float
    skewness: float
    kurtosis: float

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in asdict(self).items()}


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    decision: str
    level: float
    detail: dict = field(default_factory=dict)

    @property
    def reject(self) -> bool:
        return self.decision == "reject"

    def to_dict(self) -> dict:
        return asdict(self)


def _decide(p_value, level):
    return "reject" if p_value < level else "fail_to_reject"


def describe(x) -> DescriptiveStats:
    """
    Sample size, mean, median, extremes, standard deviation, skewness and
    (raw) kurtosis of ``x``.

    A zero-variance sample has undefined skewness and kurtosis; they are
    returned as ``nan`` with a :class:`SkewUndefinedWarning`.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise TooFewObservations(f"need at least 2 observations, got {n}")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    if m2 > 0:
        skew = float(np.mean(dev**3) / m2**1.5)
        kurt = float(np.mean(dev**4) / m2**2)
    else:
        warnings.warn("zero variance: skewness and kurtosis undefined",
                      SkewUndefinedWarning, stacklevel=2)
        skew = kurt = math.nan
    return DescriptiveStats(
        n=n,
        mean=mean,
        median=float(np.median(x)),
        max=float(x.max()),
        min=float(x.min()),
        std_dev=float(x.std(ddof=1)),
        skewness=skew,
        kurtosis=kurt,
    )


def jarque_bera(x, level: float = 0.05) -> TestResult:
    """Jarque-Bera statistic ``n/6 * (S**2 + (K - 3)**2 / 4)`` against chi2(2)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 8:
        raise TooFewObservations(f"Jarque-Bera needs at least 8 observations, got {x.size}")
    with warnings.catch_warnings():
        warnings.simplefilter("error", SkewUndefinedWarning)
        try:
            d = describe(x)
        except SkewUndefinedWarning:
            raise TooFewObservations("Jarque-Bera is undefined for a constant series") from None
    jb = d.n / 6.0 * (d.skewness**2 + (d.kurtosis - 3.0) ** 2 / 4.0)
    p = float(sps.chi2.sf(jb, 2))
    return TestResult(float(jb), p, _decide(p, level), level,
                      {"n": d.n, "skewness": d.skewness, "kurtosis": d.kurtosis})


def _schwert(n):
    return int(math.ceil(12.0 * (n / 100.0) ** 0.25))


def _adf_design(x, lags, spec, start):
    """Regressand and design for the ADF regression using rows ``start..``."""
    dx = np.diff(x)
    y = dx[start:]
    cols = [x[start:-1]]
    for j in range(1, lags + 1):
        cols.append(dx[start - j:-j])
    nobs = y.size
    if spec in ("constant", "constant_trend"):
        cols.append(np.ones(nobs))
    if spec == "constant_trend":
        cols.append(np.arange(start + 1, start + 1 + nobs, dtype=float))
    return y, np.column_stack(cols)


def _ols(y, X):
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        raise SingularRegression(f"design has rank {rank} < {X.shape[1]} columns")
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    nobs, k = X.shape
    ssr = float(resid @ resid)
    if nobs <= k:
        raise TooFewObservations("not enough observations for the ADF regression")
    sigma2 = ssr / (nobs - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    llf = -0.5 * nobs * (math.log(2 * math.pi) + math.log(ssr / nobs) + 1.0)
    return beta, np.sqrt(np.diag(cov)), llf


def adf_test(x, max_lags: int | None = None, spec: str = "constant",
             level: float = 0.05, autolag: bool = True) -> TestResult:
    """
    Augmented Dickey-Fuller test of a unit root in ``x``.

    The regression is ``dx_t = [c] + [trend] + gamma * x_{t-1} +
    sum_j phi_j dx_{t-j} + e_t`` and the statistic is the t-ratio of
    ``gamma``. With ``autolag`` the number of augmenting lags is chosen by
    AIC over ``0..max_lags`` on a common sample, then the regression is
    re-run on all observations available for the chosen lag. p-values come
    from MacKinnon's response surfaces.

    ``max_lags`` defaults to ``ceil(12 * (n/100)**0.25)``.
    """
    if spec not in ADF_SPECS:
        raise ValueError(f"spec must be one of {sorted(ADF_SPECS)}")
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if max_lags is None:
        max_lags = min(_schwert(n), max(n // 2 - 6, 0))
    if max_lags < 0:
        raise ValueError("max_lags must be non-negative")
    if n < max_lags + 10:
        raise TooFewObservations(f"ADF with {max_lags} lags needs at least "
                                 f"{max_lags + 10} observations, got {n}")

    if autolag:
        best = None
        for lags in range(max_lags + 1):
            y, X = _adf_design(x, lags, spec, max_lags)
            _, _, llf = _ols(y, X)
            ic = -2.0 * llf + 2.0 * X.shape[1]
            if best is None or ic < best[0]:
                best = (ic, lags)
        used = best[1]
    else:
        used = max_lags

    y, X = _adf_design(x, used, spec, used)
    beta, se, _ = _ols(y, X)
    stat = float(beta[0] / se[0])
    reg = ADF_SPECS[spec]
    p = float(mackinnonp(stat, regression=reg, N=1))
    crit = mackinnoncrit(N=1, regression=reg, nobs=y.size)
    return TestResult(
        stat, p, _decide(p, level), level,
        {
            "lags": used,
            "max_lags": max_lags,
            "spec": spec,
            "nobs": int(y.size),
            "critical_values": {"1%": float(crit[0]), "5%": float(crit[1]),
                                "10%": float(crit[2])},
        },
    )


def _stars(p):
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def summary_table(columns: dict, adf_max_lags=None, adf_spec="constant") -> dict:
    """
    Descriptive statistics with Jarque-Bera and ADF results for each named
    series, as a nested dict ``{name: {...}}``.
    """
    out = {}
    for name, x in columns.items():
        d = describe(x)
        jb = jarque_bera(x)
        adf = adf_test(x, max_lags=adf_max_lags, spec=adf_spec)
        out[name] = {
            **d.to_dict(),
            "jarque_bera": jb.statistic,
            "jarque_bera_p": jb.p_value,
            "adf": adf.statistic,
            "adf_p": adf.p_value,
            "adf_lags": adf.detail["lags"],
        }
    return out


def summary_text(table: dict) -> str:
    names = list(table)
    rows = [
        ("Mean", "mean"), ("Median", "median"), ("Maximum", "max"), ("Minimum", "min"),
        ("Std. Dev.", "std_dev"), ("Skewness", "skewness"), ("Kurtosis", "kurtosis"),
        ("Jarque-Bera", "jarque_bera"), ("(Probability)", "jarque_bera_p"),
        ("ADF Test", "adf"), ("(Level)", "adf_p"),
    ]
    width = max(14, *(len(n) + 2 for n in names))
    lines = [f"{'':<14}" + "".join(f"{n:>{width}}" for n in names)]
    for label, key in rows:
        cells = []
        for n in names:
            v = table[n][key]
            if v is None:
                cells.append(f"{'n/a':>{width}}")
            elif key.endswith("_p"):
                cells.append(f"{f'[{v:.4f}]{_stars(v)}':>{width}}")
            else:
                cells.append(f"{v:>{width}.4f}")
        lines.append(f"{label:<14}" + "".join(cells))
    return "\n".join(lines) + "\n"
