"""
Simulating GARCH-MIDAS returns
==============================

Draw daily returns whose long-run variance follows a persistent monthly
regressor, then look at the two variance components and the Gaussian
log-likelihood.
"""
import numpy as np

from garchmidas import (
    CARBON_RV_PARAMS,
    ParameterSet,
    conditional_variance_path,
    log_likelihood,
    simulate_dataset,
)

params = ParameterSet(**CARBON_RV_PARAMS)
print(params)

#%%
# 120 months of 22 trading days; the regressor gets 24 extra months of
# history so every simulated month has a full lag window
daily, x, panel = simulate_dataset(params, n_months=120, days_per_month=22, seed=0)
print(len(daily), "days,", panel.n_periods, "months,", len(x), "regressor months")

#%%
# tau is constant within a month, g carries the daily clustering and
# averages close to one
path = conditional_variance_path(params, panel)
print("tau range", path.tau.min(), path.tau.max())
print("mean g", path.g.mean())
print("mean variance vs sample variance", path.variance.mean(), daily.values.var())

#%%
# The log-likelihood is highest near the parameters that generated the data
for alpha in (0.06, 0.1221, 0.13):
    p = params.with_values(alpha=alpha)
    print(alpha, round(log_likelihood(p, panel), 2))
