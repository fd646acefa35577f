"""
Maximum-likelihood estimation
=============================

Fit the model to simulated data and read the report: estimates, standard
errors from the numerical Hessian, t statistics, the log-likelihood and AIC.
"""
from garchmidas import CARBON_RV_PARAMS, ParameterSet, fit, simulate_dataset

truth = ParameterSet(**CARBON_RV_PARAMS)
_, _, panel = simulate_dataset(truth, n_months=240, days_per_month=22, seed=4)

#%%
# The default search runs Nelder-Mead from a small grid of starts and then
# restarts around the best point until it stops improving
result = fit(panel)
print(result.to_text())

#%%
# Compare with the truth
for name in ("alpha", "beta", "theta", "omega2", "m"):
    print(f"{name:>7} true {getattr(truth, name):8.4f}  fitted {getattr(result.params, name):8.4f}")

#%%
# A nested model with the regressor switched off: theta = 0 and flat weights
# leave a plain GARCH(1,1) with unconditional variance m
plain = fit(panel, fixed={"theta": 0.0, "omega2": 1.0})
print("AIC full", round(result.aic, 1), " AIC plain GARCH", round(plain.aic, 1))

#%%
# Reports serialise to JSON and back
again = type(result).from_json(result.to_json())
print(again.params == result.params)
