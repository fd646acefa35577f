"""
GARCH-MIDAS volatility modelling.

Daily return variance is the product of a short-run GARCH(1,1) factor and a
monthly long-run component driven by a Beta-weighted MIDAS filter of a
low-frequency regressor (realised volatility, a policy-uncertainty index,
or any monthly series).
"""

from garchmidas.data import (
    DailySeries,
    LowFrequencySeries,
    MixedPanel,
    align_panel,
    compute_log_returns,
    load_daily_series,
    load_monthly_series,
    realized_volatility,
)
from garchmidas.estimate import FitResult, OptimizerOptions, aic, fit, standard_errors
from garchmidas.forecast import (
    PRESETS,
    ForecastSeries,
    LossReport,
    WindowConfig,
    evaluate,
    forecast_one_step,
    run_protocol,
)
from garchmidas.index_builder import IndexPanel, build_global_index
from garchmidas.midas import beta_weights, long_run_component
from garchmidas.model import (
    CARBON_RV_PARAMS,
    ParameterSet,
    conditional_variance_path,
    filter_short_run,
    log_likelihood,
    simulate,
    simulate_dataset,
    simulate_regressor,
)
from garchmidas.stats import adf_test, describe, jarque_bera

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "CARBON_RV_PARAMS",
    "DailySeries",
    "FitResult",
    "ForecastSeries",
    "IndexPanel",
    "LossReport",
    "LowFrequencySeries",
    "MixedPanel",
    "OptimizerOptions",
    "ParameterSet",
    "WindowConfig",
    "adf_test",
    "aic",
    "align_panel",
    "beta_weights",
    "build_global_index",
    "compute_log_returns",
    "conditional_variance_path",
    "describe",
    "evaluate",
    "filter_short_run",
    "fit",
    "forecast_one_step",
    "jarque_bera",
    "load_daily_series",
    "load_monthly_series",
    "log_likelihood",
    "long_run_component",
    "realized_volatility",
    "run_protocol",
    "simulate",
    "simulate_dataset",
    "simulate_regressor",
    "standard_errors",
]
