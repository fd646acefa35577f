"""
Out-of-sample forecasts and loss functions
==========================================

The evaluation protocol fits on an estimation window, keeps the parameters
fixed, forecasts the next day's variance through an out-of-sample span and
scores both spans with four losses. Two regressors on the same returns can
then be compared.
"""
from garchmidas import CARBON_RV_PARAMS, ParameterSet, simulate_dataset
from garchmidas.forecast import (
    PRESETS,
    compare_reports,
    comparison_text,
    loss_functions,
    run_protocol,
)

#%%
# RMAE and RMAD are square roots of mean absolute errors. With actuals of 2
# and forecasts of 1 that gives 1, 1, sqrt(2) - 1 and sqrt(sqrt(2) - 1)
print(loss_functions([2.0, 2.0], [1.0, 1.0]))

#%%
# Data shaped like the 2008-2015 sample: estimation 2010-01..2014-10,
# out-of-sample 2014-10..2015-09, K = 24
cfg = PRESETS["paper-2008-2015"]
daily, epu, _ = simulate_dataset(ParameterSet(**CARBON_RV_PARAMS), 93, 22, 24, seed=2,
                                 start="2008-01", label="EPU")
with_epu = run_protocol(daily, epu, cfg)
print(with_epu.to_text())

#%%
# Realized volatility built from the same returns as the alternative regressor
with_rv = run_protocol(daily, "rv", cfg)
cmp = compare_reports({"RV": with_rv.to_dict(), "EPU": with_epu.to_dict()})
print(comparison_text(cmp))
