"""
Descriptive statistics and unit-root tests
==========================================

A summary table of moments, the Jarque-Bera normality test and the
augmented Dickey-Fuller test for a return series and a persistent monthly
index.
"""
import numpy as np

from garchmidas import adf_test, describe, jarque_bera
from garchmidas.stats import summary_table, summary_text

rng = np.random.default_rng(1)

#%%
# Kurtosis is raw, so a normal sample sits near 3
x = rng.standard_normal(5000)
print(describe(x))

#%%
# Fat tails are picked up by Jarque-Bera
t_draws = rng.standard_t(4, size=5000)
print(jarque_bera(x).decision, jarque_bera(t_draws).decision)

#%%
# The ADF lag order is picked by AIC; the chosen order and the MacKinnon
# critical values are kept in ``detail``
walk = np.cumsum(rng.standard_normal(600))
res = adf_test(walk)
print(res.statistic, res.p_value, res.decision)
print(res.detail["lags"], res.detail["critical_values"])

#%%
# Several series at once, printed in the aligned layout
epu = 140 + 30 * np.exp(np.cumsum(rng.normal(0, 0.05, 120)) * 0.3)
table = summary_table({"RCP": t_draws[:1500] * 0.02, "EUEPU": epu})
print(summary_text(table))
