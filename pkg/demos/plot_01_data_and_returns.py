"""
Daily prices, log returns and monthly realized volatility
=========================================================

Loading a daily price file, turning it into log returns and summing squared
returns into a monthly realized-volatility series. The last step lines the
daily returns up with lagged monthly values, which is the input every model
in the package consumes.
"""
import tempfile
from pathlib import Path

import numpy as np

from garchmidas import (
    align_panel,
    compute_log_returns,
    load_daily_series,
    realized_volatility,
)

#%%
# A tiny price file. Rows do not need to be sorted, the loader orders them
# by date and rejects duplicates or non-positive prices.
tmp = Path(tempfile.mkdtemp())
rng = np.random.default_rng(0)
days = np.datetime64("2008-01-01") + np.arange(900)
days = days[np.is_busday(days)]
prices = 20 * np.exp(np.cumsum(rng.normal(0, 0.02, days.size)))
rows = [f"{d},{p:.4f}" for d, p in zip(days, prices)]
rng.shuffle(rows)
(tmp / "carbon.csv").write_text("date,value\n" + "\n".join(rows) + "\n")

series = load_daily_series(tmp / "carbon.csv", kind="price")
print(len(series), series.dates[0], series.dates[-1])

#%%
# Log returns drop the first day
returns = compute_log_returns(series)
print(returns.values[:5])

#%%
# Realized volatility is the sum of squared daily returns within each month
rv = realized_volatility(returns)
print(rv.months[:3], rv.values[:3])

#%%
# With K = 12 lags a month needs a full year of prior RV, so the first
# twelve months cannot be modelled. ``drop_incomplete`` drops them and
# counts them instead of raising.
panel = align_panel(returns, rv, n_lags=12, drop_incomplete=True)
print(panel.n_periods, "usable months,", panel.n_excluded, "dropped")
print("lags of the first usable month:", panel.lags[0, :3], "...")
