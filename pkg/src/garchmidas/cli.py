"""
Command-line interface.

Subcommands: ``stats``, ``weights``, ``fit``, ``forecast``, ``evaluate``,
``protocol``, ``compare``, ``simulate`` and ``build-index``.

Options may also come from a flat JSON config file (``--config`` or the
``GARCHMIDAS_CONFIG`` environment variable); command-line flags win.

Exit codes: 0 success, 2 bad input or configuration, 3 infeasible
parameters, 4 optimiser non-convergence (unless ``--allow-nonconverged``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from garchmidas import data as gdata
from garchmidas.errors import (
    GarchMidasError,
    InfeasibleParams,
    NonConvergence,
)
from garchmidas.estimate import FitResult, OptimizerOptions, fit
from garchmidas.forecast import (
    PRESETS,
    ForecastSeries,
    WindowConfig,
    compare_reports,
    comparison_text,
    evaluate,
    forecast_one_step,
    losses_csv,
    losses_text,
    run_protocol,
)
from garchmidas.index_builder import build_global_index, load_index_panel
from garchmidas.midas import beta_weights
from garchmidas.model import CARBON_RV_PARAMS, ParameterSet, simulate_dataset
from garchmidas.stats import summary_table, summary_text

CONFIG_ENV = "GARCHMIDAS_CONFIG"
EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NONCONVERGED = 2, 3, 4


@dataclass
class RunConfig:
    """Flat run configuration; every field can be set from JSON or a flag."""

    daily: str | None = None
    kind: str = "price"
    regressor: str = "rv"
    monthly: str | None = None
    lags: int = gdata.DEFAULT_LAGS
    preset: str | None = None
    est_start: str | None = None
    est_end: str | None = None
    oos_start: str | None = None
    oos_end: str | None = None
    full_start: str | None = None
    full_end: str | None = None
    fix_omega1: bool = True
    optimizer: dict = field(default_factory=dict)
    allow_nonconverged: bool = False
    seed: int = 0
    output: str | None = None
    format: str = "json"

    def validate(self):
        if self.lags < 1:
            raise ValueError("lags must be >= 1")
        if self.regressor not in ("rv", "file"):
            raise ValueError("regressor must be 'rv' or 'file'")
        if self.regressor == "file" and not self.monthly:
            raise ValueError("--regressor file needs --monthly PATH")
        if self.kind not in ("price", "return"):
            raise ValueError("kind must be 'price' or 'return'")
        if self.format not in ("json", "text", "csv"):
            raise ValueError("format must be json, text or csv")
        for a, b in (("est_start", "est_end"), ("oos_start", "oos_end"),
                     ("full_start", "full_end")):
            lo, hi = getattr(self, a), getattr(self, b)
            if lo and hi and gdata.to_month(hi) < gdata.to_month(lo):
                raise ValueError(f"{a}={lo} is after {b}={hi}")

    def window(self) -> WindowConfig:
        base = PRESETS[self.preset] if self.preset else None
        if self.preset and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")

        def pick(name):
            value = getattr(self, name)
            return value if value is not None or base is None else getattr(base, name)

        est_start, est_end = pick("est_start"), pick("est_end")
        if est_start is None or est_end is None:
            raise ValueError("an estimation window (--est-start/--est-end or --preset) "
                             "is required")
        return WindowConfig(
            est_start=est_start,
            est_end=est_end,
            oos_start=pick("oos_start"),
            oos_end=pick("oos_end"),
            n_lags=self.lags,
            fix_omega1=self.fix_omega1,
            full_start=pick("full_start"),
            full_end=pick("full_end"),
            options=dict(self.optimizer),
        )


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return cfg


def _run_config(args) -> RunConfig:
    values = _load_config(args.config or os.environ.get(CONFIG_ENV))
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Helpers


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        gdata.atomic_write_text(cfg.output, text)
    else:
        sys.stdout.write(text)


def _daily(cfg: RunConfig) -> gdata.DailySeries:
    if not cfg.daily:
        raise ValueError("--daily PATH is required")
    kind = "price" if cfg.kind == "price" else "log_return"
    return gdata.load_daily_series(cfg.daily, kind=kind)


def _returns(cfg: RunConfig) -> gdata.DailySeries:
    series = _daily(cfg)
    if series.kind == "price":
        series = gdata.compute_log_returns(series)
    return series.between(cfg.full_start, cfg.full_end)


def _regressor(cfg: RunConfig):
    if cfg.regressor == "rv":
        return "rv"
    return gdata.load_monthly_series(cfg.monthly)


def _panel(cfg: RunConfig, returns) -> gdata.MixedPanel:
    reg = _regressor(cfg)
    if reg == "rv":
        reg = gdata.realized_volatility(returns, label="RV")
    return gdata.align_panel(returns, reg, cfg.lags, drop_incomplete=True)


def _check_converged(cfg: RunConfig, result: FitResult):
    if not result.converged and not cfg.allow_nonconverged:
        raise NonConvergence(
            f"fit did not converge ({result.message}); rerun with --allow-nonconverged "
            "to inspect the result"
        )


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_stats(cfg: RunConfig, args):
    columns = {}
    if cfg.daily:
        columns[args.label] = _returns(cfg).values
    for path in args.extra or []:
        s = gdata.load_monthly_series(path)
        columns[s.label] = s.values
    if cfg.monthly:
        s = gdata.load_monthly_series(cfg.monthly)
        columns[s.label] = s.values
    if not columns:
        raise ValueError("nothing to describe: give --daily and/or --monthly")
    table = summary_table(columns, adf_max_lags=args.adf_max_lags, adf_spec=args.adf_spec)
    _emit(cfg, summary_text(table) if cfg.format == "text" else _json(table))


def cmd_weights(cfg: RunConfig, args):
    w = beta_weights(cfg.lags, args.omega1, args.omega2)
    lines = ["lag,weight"] + [f"{k},{float(v)!r}" for k, v in enumerate(w.weights, start=1)]
    _emit(cfg, "\n".join(lines) + "\n")


def cmd_fit(cfg: RunConfig, args):
    returns = _returns(cfg)
    panel = _panel(cfg, returns).select(cfg.est_start, cfg.est_end)
    result = fit(panel, fix_omega1=cfg.fix_omega1,
                 options=OptimizerOptions.from_mapping(cfg.optimizer))
    _check_converged(cfg, result)
    _emit(cfg, result.to_text() if cfg.format == "text" else result.to_json())


def cmd_forecast(cfg: RunConfig, args):
    with open(args.fit, encoding="utf-8") as fh:
        result = FitResult.from_json(fh.read())
    returns = _returns(cfg)
    panel = _panel(cfg, returns)
    fc = forecast_one_step(result, panel, args.start or cfg.oos_start,
                           args.end or cfg.oos_end)
    _emit(cfg, fc.to_csv())


def cmd_evaluate(cfg: RunConfig, args):
    with open(args.forecast, encoding="utf-8") as fh:
        fc = ForecastSeries.from_csv(fh.read())
    report = evaluate(fc, args.sample)
    if cfg.format == "csv":
        text = losses_csv([report])
    elif cfg.format == "text":
        text = losses_text("", [report])
    else:
        text = _json(report.to_dict())
    _emit(cfg, text)


def cmd_protocol(cfg: RunConfig, args):
    window = cfg.window()
    daily = _daily(cfg)
    reg = _regressor(cfg)
    result = run_protocol(daily, reg, window)
    _check_converged(cfg, result.fit)
    if cfg.format == "text":
        text = result.to_text()
    elif cfg.format == "csv":
        text = result.losses_csv()
    else:
        text = result.to_json()
    _emit(cfg, text)
    if args.forecast_csv and result.forecast is not None:
        gdata.atomic_write_text(args.forecast_csv, result.forecast.to_csv())


def cmd_compare(cfg: RunConfig, args):
    reports = {}
    for path in args.reports:
        with open(path, encoding="utf-8") as fh:
            rep = json.load(fh)
        label = rep.get("regressor", path)
        if label in reports:
            label = path
        reports[label] = rep
    cmp = compare_reports(reports, args.sample)
    _emit(cfg, comparison_text(cmp) if cfg.format == "text" else _json(cmp))


def cmd_simulate(cfg: RunConfig, args):
    values = dict(CARBON_RV_PARAMS)
    for name in ("mu", "alpha", "beta", "theta", "omega2", "m"):
        v = getattr(args, f"p_{name}")
        if v is not None:
            values[name] = v
    params = ParameterSet(**values)
    daily, x, _ = simulate_dataset(
        params, args.months, args.days, cfg.lags, seed=cfg.seed, start=args.start,
        regressor_mean=args.regressor_mean, regressor_persistence=args.regressor_persistence,
        regressor_cv=args.regressor_cv, label=args.label,
    )
    if args.as_prices:
        prices = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(daily.values)]))
        first = daily.dates[0] - 1
        daily = gdata.DailySeries(np.concatenate([[first], daily.dates]), prices, "price")
    gdata.write_daily_csv(daily, args.out_daily)
    gdata.write_monthly_csv(x, args.out_monthly)


def cmd_build_index(cfg: RunConfig, args):
    panel = load_index_panel(args.panel)
    idx = build_global_index(panel, args.scaling, label=args.label)
    if not cfg.output:
        raise ValueError("build-index needs --output PATH for the monthly CSV")
    gdata.write_monthly_csv(idx.series, cfg.output)
    sidecar = args.sidecar or os.path.splitext(cfg.output)[0] + ".json"
    gdata.atomic_write_text(sidecar, idx.sidecar_json())


# ---------------------------------------------------------------------------
# Parser


def _common(p, data=True, window=False):
    p.add_argument("--config", help=f"JSON config file (default ${CONFIG_ENV})")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text", "csv"))
    if data:
        p.add_argument("--daily", help="daily CSV with header date,value")
        p.add_argument("--kind", choices=("price", "return"),
                       help="whether the daily values are prices or log returns")
        p.add_argument("--regressor", choices=("rv", "file"))
        p.add_argument("--monthly", help="monthly CSV with header month,value")
        p.add_argument("--lags", type=int, help="number of monthly MIDAS lags K")
        p.add_argument("--full-start", dest="full_start")
        p.add_argument("--full-end", dest="full_end")
    if window:
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--est-start", dest="est_start")
        p.add_argument("--est-end", dest="est_end")
        p.add_argument("--oos-start", dest="oos_start")
        p.add_argument("--oos-end", dest="oos_end")
        p.add_argument("--free-omega1", dest="fix_omega1", action="store_const",
                       const=False, help="estimate omega1 instead of fixing it at 1")
        p.add_argument("--allow-nonconverged", dest="allow_nonconverged",
                       action="store_const", const=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="garchmidas", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="descriptive statistics, Jarque-Bera and ADF")
    _common(p)
    p.add_argument("--label", default="RCP", help="column label for the daily returns")
    p.add_argument("--extra", nargs="*", help="further monthly CSVs to describe")
    p.add_argument("--adf-max-lags", type=int, dest="adf_max_lags")
    p.add_argument("--adf-spec", default="constant",
                   choices=("constant", "constant_trend", "none"))
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("weights", help="print Beta lag weights as CSV")
    _common(p, data=False)
    p.add_argument("--lags", type=int)
    p.add_argument("--omega1", type=float, default=1.0)
    p.add_argument("--omega2", type=float, required=True)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("fit", help="maximum-likelihood fit")
    _common(p, window=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", help="one-step-ahead forecasts from a fit report")
    _common(p)
    p.add_argument("--fit", required=True, help="fit report JSON")
    p.add_argument("--start", help="first forecast month (YYYY-MM)")
    p.add_argument("--end", help="last forecast month (YYYY-MM)")
    p.add_argument("--oos-start", dest="oos_start", help=argparse.SUPPRESS)
    p.add_argument("--oos-end", dest="oos_end", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("evaluate", help="loss functions of a forecast CSV")
    _common(p, data=False)
    p.add_argument("--forecast", required=True)
    p.add_argument("--sample", default="out_of_sample",
                   choices=("full_sample", "out_of_sample"))
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("protocol", help="fit, forecast and evaluate over a window layout")
    _common(p, window=True)
    p.add_argument("--forecast-csv", dest="forecast_csv",
                   help="also write the out-of-sample forecasts here")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("compare", help="side-by-side losses of protocol reports")
    _common(p, data=False)
    p.add_argument("reports", nargs="+", help="protocol report JSON files")
    p.add_argument("--sample", default="out_of_sample",
                   choices=("full_sample", "out_of_sample"))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="write simulated daily and monthly CSVs")
    _common(p, data=False)
    p.add_argument("--lags", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--months", type=int, default=500)
    p.add_argument("--days", type=int, default=22)
    p.add_argument("--start", default="2008-01", help="first simulated month")
    p.add_argument("--out-daily", dest="out_daily", required=True)
    p.add_argument("--out-monthly", dest="out_monthly", required=True)
    p.add_argument("--as-prices", dest="as_prices", action="store_true",
                   help="write prices (base 100) instead of log returns")
    p.add_argument("--label", default="X")
    p.add_argument("--regressor-mean", dest="regressor_mean", type=float, default=1.0)
    p.add_argument("--regressor-persistence", dest="regressor_persistence",
                   type=float, default=0.98)
    p.add_argument("--regressor-cv", dest="regressor_cv", type=float, default=2.0)
    for name in ("mu", "alpha", "beta", "theta", "omega2", "m"):
        p.add_argument(f"--{name}", dest=f"p_{name}", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("build-index", help="first-principal-component global index")
    _common(p, data=False)
    p.add_argument("--panel", required=True, help="wide CSV month,COUNTRY1,...")
    p.add_argument("--scaling", default="standardize",
                   choices=("standardize", "center_only"))
    p.add_argument("--label", default="GEPU")
    p.add_argument("--sidecar", help="JSON sidecar path (default: output with .json)")
    p.set_defaults(func=cmd_build_index)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _run_config(args)
        args.func(cfg, args)
    except NonConvergence as exc:
        print(f"garchmidas: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except InfeasibleParams as exc:
        print(f"garchmidas: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GarchMidasError, ValueError, KeyError, OSError) as exc:
        print(f"garchmidas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
