"""
A global index from country indexes
===================================

The first principal component of a panel of country uncertainty indexes,
rescaled to the level and spread of their simple average.
"""
import numpy as np

from garchmidas import IndexPanel, build_global_index

rng = np.random.default_rng(7)
months = np.datetime64("2000-01", "M") + np.arange(180)
common = np.cumsum(rng.normal(0, 0.2, 180))

#%%
# Twenty countries load on a common factor with their own noise and scale.
# One month is missing for one country and is dropped.
levels = rng.uniform(80, 250, 20)
panel = levels + 30 * (common[:, None] + rng.normal(0, 0.6, (180, 20)))
panel[-1, 3] = np.nan
data = IndexPanel.from_raw(months, [f"C{i:02d}" for i in range(20)], panel)
print(data.matrix.shape, "dropped", data.n_dropped)

#%%
# Correlation PCA is the default, so national scale does not matter
gepu = build_global_index(data)
print("explained variance", round(gepu.explained_variance_ratio, 3))
print("corr with factor", np.corrcoef(gepu.series.values, common[:-1])[0, 1])
print(gepu.sidecar()["loadings"][:4])
