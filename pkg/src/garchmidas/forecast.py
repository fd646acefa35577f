"""
One-step-ahead variance forecasts with fixed parameters, loss functions,
and the estimation-window / out-of-sample protocol.

The realised daily variance is proxied by the squared demeaned return
``(r - mu_hat)**2``. The four losses are computed exactly as

    RMSE = sqrt(mean((s2 - f2)**2))      RMAE = sqrt(mean(|s2 - f2|))
    RMSD = sqrt(mean((s - f)**2))        RMAD = sqrt(mean(|s - f|))

with ``s2`` the proxy, ``f2`` the forecast and ``s, f`` their square roots.
Note that RMAE and RMAD are square roots of mean absolute errors, not plain
mean absolute errors.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from garchmidas.data import (
    DailySeries,
    LowFrequencySeries,
    MixedPanel,
    align_panel,
    compute_log_returns,
    realized_volatility,
    to_month,
)
from garchmidas.errors import (
    EmptySeries,
    InsufficientLagHistory,
    RangeBeforeFitWindow,
)
from garchmidas.estimate import FitResult, fit as fit_model
from garchmidas.model import conditional_variance_path

__all__ = [
    "PRESETS",
    "ForecastSeries",
    "LossReport",
    "ProtocolResult",
    "WindowConfig",
    "compare_reports",
    "evaluate",
    "forecast_one_step",
    "loss_functions",
    "run_protocol",
]

LOSS_NAMES = ("rmse", "rmsd", "rmae", "rmad")


@dataclass(frozen=True, eq=False)
class ForecastSeries:
    dates: np.ndarray
    predicted: np.ndarray
    actual: np.ndarray

    def __post_init__(self):
        if not (self.dates.shape == self.predicted.shape == self.actual.shape):
            raise ValueError("dates, predicted and actual must align")
        if np.any(~(self.predicted > 0)):
            raise ValueError("predicted variances must be positive")
        if np.any(self.actual < 0):
            raise ValueError("actual variance proxies must be non-negative")

    def __len__(self):
        return self.dates.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("date", "predicted_variance", "actual_proxy"))
        for d, p, a in zip(self.dates, self.predicted, self.actual):
            writer.writerow((str(d), repr(float(p)), repr(float(a))))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ForecastSeries":
        reader = csv.DictReader(io.StringIO(text))
        rows = list(reader)
        return cls(
            np.array([r["date"] for r in rows], dtype="datetime64[D]"),
            np.array([float(r["predicted_variance"]) for r in rows]),
            np.array([float(r["actual_proxy"]) for r in rows]),
        )


@dataclass(frozen=True)
class LossReport:
    rmse: float
    rmsd: float
    rmae: float
    rmad: float
    sample: str
    T: int

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> tuple:
        return (self.sample, *(repr(getattr(self, n)) for n in LOSS_NAMES), self.T)


def loss_functions(actual, predicted) -> dict:
    """The four losses for arrays of realised and predicted variances."""
    s2 = np.asarray(actual, dtype=float)
    f2 = np.asarray(predicted, dtype=float)
    if s2.size == 0:
        raise EmptySeries("no forecasts to evaluate")
    d2 = s2 - f2
    d1 = np.sqrt(s2) - np.sqrt(f2)
    return {
        "rmse": float(np.sqrt(np.mean(d2**2))),
        "rmsd": float(np.sqrt(np.mean(d1**2))),
        "rmae": float(np.sqrt(np.mean(np.abs(d2)))),
        "rmad": float(np.sqrt(np.mean(np.abs(d1)))),
    }


def evaluate(fc: ForecastSeries, sample: str = "out_of_sample") -> LossReport:
    if sample not in ("full_sample", "out_of_sample"):
        raise ValueError(f"unknown sample label {sample!r}")
    if len(fc) == 0:
        raise EmptySeries("no forecasts to evaluate")
    return LossReport(**loss_functions(fc.actual, fc.predicted), sample=sample, T=len(fc))


def forecast_one_step(fit: FitResult, panel: MixedPanel, start=None, end=None,
                      link: str = "level") -> ForecastSeries:
    """
    Next-day variance forecasts over months ``[start, end]`` with the
    parameters of ``fit`` held fixed.

    The short-run recursion is run with realised returns from the first
    month of the fit window (or the panel start, if later) so that the
    forecast for day ``d`` uses returns through ``d - 1`` only; the long-run
    component of each month uses that month's lagged regressor values.

    Raises
    ------
    RangeBeforeFitWindow
        ``start`` precedes the first month of the fit window.
    InsufficientLagHistory
        The panel does not cover the requested months.
    """
    fit_start = to_month(fit.sample_start)
    start = panel.months[0] if start is None else to_month(start)
    end = panel.months[-1] if end is None else to_month(end)
    if start < fit_start:
        raise RangeBeforeFitWindow(
            f"forecast range starts {start}, before the fit window {fit_start}"
        )
    if end < start:
        raise ValueError(f"empty forecast range {start} .. {end}")
    if start < panel.months[0] or end > panel.months[-1]:
        raise InsufficientLagHistory(
            f"panel covers {panel.months[0]} .. {panel.months[-1]}, not {start} .. {end}",
            first_usable=panel.months[0],
        )
    run = panel.select(max(fit_start, panel.months[0]), end)
    path = conditional_variance_path(fit.params, run, link=link)
    keep = run.months[run.period_index] >= start
    predicted = path.variance[keep]
    actual = (run.returns[keep] - fit.params.mu) ** 2
    return ForecastSeries(run.dates[keep], predicted, actual)


# ---------------------------------------------------------------------------
# Protocol


@dataclass(frozen=True)
class WindowConfig:
    """
    Month spans for estimation and out-of-sample evaluation.

    ``oos_start``/``oos_end`` may be ``None`` for an in-sample-only run.
    ``full_start``/``full_end`` optionally trim the daily data first.
    """

    est_start: str
    est_end: str
    oos_start: str | None = None
    oos_end: str | None = None
    n_lags: int = 24
    fix_omega1: bool = True
    full_start: str | None = None
    full_end: str | None = None
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.n_lags < 1:
            raise ValueError("n_lags must be >= 1")
        if to_month(self.est_end) < to_month(self.est_start):
            raise ValueError("estimation window ends before it starts")
        if (self.oos_start is None) != (self.oos_end is None):
            raise ValueError("give both oos_start and oos_end, or neither")
        if self.oos_start is not None:
            if to_month(self.oos_start) < to_month(self.est_start):
                raise RangeBeforeFitWindow(
                    f"out-of-sample span starts {self.oos_start}, before the "
                    f"estimation window {self.est_start}"
                )
            if to_month(self.oos_end) < to_month(self.oos_start):
                raise ValueError("out-of-sample span ends before it starts")

    @property
    def last_month(self):
        ends = [to_month(self.est_end)]
        if self.oos_end is not None:
            ends.append(to_month(self.oos_end))
        return max(ends)


PRESETS = {
    "paper-2008-2015": WindowConfig(
        est_start="2010-01",
        est_end="2014-10",
        oos_start="2014-10",
        oos_end="2015-09",
        n_lags=24,
        full_start="2008-01",
        full_end="2015-09",
    ),
}


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    fit: FitResult
    in_sample: LossReport
    forecast: ForecastSeries | None
    out_of_sample: LossReport | None
    config: WindowConfig

    @property
    def losses(self) -> list[LossReport]:
        return [r for r in (self.in_sample, self.out_of_sample) if r is not None]

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        return {
            "regressor": self.fit.regressor,
            "config": cfg,
            "fit": self.fit.to_dict(),
            "losses": [r.to_dict() for r in self.losses],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def losses_csv(self) -> str:
        return losses_csv(self.losses)

    def to_text(self) -> str:
        return self.fit.to_text() + "\n" + losses_text(self.fit.regressor, self.losses)


def losses_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("sample", *LOSS_NAMES, "T"))
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def losses_text(label, reports) -> str:
    lines = [f"{label:<16}" + "".join(f"{n.upper():>14}" for n in LOSS_NAMES) + f"{'T':>8}"]
    for r in reports:
        lines.append(
            f"{r.sample:<16}" + "".join(f"{getattr(r, n):>14.4e}" for n in LOSS_NAMES)
            + f"{r.T:>8d}"
        )
    return "\n".join(lines) + "\n"


def _build_panel(daily: DailySeries, regressor, cfg: WindowConfig) -> MixedPanel:
    if daily.kind == "price":
        daily = compute_log_returns(daily)
    daily = daily.between(cfg.full_start, cfg.full_end)
    daily = daily.between(None, cfg.last_month)
    if isinstance(regressor, str):
        if regressor.lower() != "rv":
            raise ValueError(f"unknown regressor {regressor!r}")
        rv = realized_volatility(daily, label="RV")
        panel = align_panel(daily, rv, cfg.n_lags, drop_incomplete=True)
    else:
        panel = align_panel(daily.between(cfg.est_start, None), regressor, cfg.n_lags)
    if panel.months[0] > to_month(cfg.est_start):
        raise InsufficientLagHistory(
            f"estimation window starts {cfg.est_start} but {cfg.n_lags} lags are "
            f"first available for {panel.months[0]}",
            first_usable=panel.months[0],
        )
    if panel.months[-1] < cfg.last_month:
        raise InsufficientLagHistory(
            f"daily data end {panel.months[-1]}, before {cfg.last_month}"
        )
    return panel.select(cfg.est_start, cfg.last_month)


def run_protocol(daily: DailySeries, regressor: LowFrequencySeries | str,
                 cfg: WindowConfig) -> ProtocolResult:
    """
    Fit on the estimation window, forecast the out-of-sample span with the
    parameters fixed, and evaluate both.

    ``regressor`` is a monthly series or ``"rv"`` for realised volatility
    computed from ``daily``. The in-sample report carries the
    ``full_sample`` label and measures estimation error; the out-of-sample
    report measures prediction error.
    """
    cfg.validate()
    panel = _build_panel(daily, regressor, cfg)
    est = panel.select(cfg.est_start, cfg.est_end)
    result = fit_model(est, fix_omega1=cfg.fix_omega1, options=cfg.options)
    link = cfg.options.get("link", "level") if cfg.options else "level"
    in_fc = forecast_one_step(result, panel, cfg.est_start, cfg.est_end, link=link)
    in_sample = evaluate(in_fc, "full_sample")
    fc, oos = None, None
    if cfg.oos_start is not None:
        fc = forecast_one_step(result, panel, cfg.oos_start, cfg.oos_end, link=link)
        oos = evaluate(fc, "out_of_sample")
    return ProtocolResult(result, in_sample, fc, oos, cfg)


def compare_reports(reports: dict, sample: str = "out_of_sample") -> dict:
    """
    Side-by-side losses of several protocol reports (label -> report dict)
    and the label with the smallest value of each loss.
    """
    rows = {}
    for label, rep in reports.items():
        found = [r for r in rep["losses"] if r["sample"] == sample]
        if not found:
            raise ValueError(f"report {label!r} has no {sample} losses")
        rows[label] = {n: found[0][n] for n in (*LOSS_NAMES, "T")}
    if not rows:
        raise EmptySeries("nothing to compare")
    best = {n: min(rows, key=lambda k: rows[k][n]) for n in LOSS_NAMES}
    return {"sample": sample, "models": rows, "best": best}


def comparison_text(cmp: dict) -> str:
    lines = [f"{cmp['sample']:<16}" + "".join(f"{n.upper():>14}" for n in LOSS_NAMES)]
    for label, row in cmp["models"].items():
        lines.append(f"{label:<16}" + "".join(f"{row[n]:>14.4e}" for n in LOSS_NAMES))
    lines.append(f"{'lowest':<16}" + "".join(f"{cmp['best'][n]:>14}" for n in LOSS_NAMES))
    return "\n".join(lines) + "\n"
