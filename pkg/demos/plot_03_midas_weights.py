"""
Beta lag weights and the long-run component
===========================================

The long-run variance of a month is ``tau = m + theta * sum_k phi_k X_{t-k}``
with Beta-polynomial weights ``phi``. With ``omega1 = 1`` the weights decay
in the lag and ``omega2`` sets how fast.
"""
import numpy as np

from garchmidas import beta_weights, long_run_component

#%%
# ``omega2 = 1`` is a flat average; larger values put more mass on recent
# months. The last lag gets exactly zero weight whenever ``omega2 > 1``.
for w2 in (1.0, 2.8589, 10.0):
    w = beta_weights(24, omega2=w2)
    print(f"omega2={w2:<7} first={w.weights[0]:.4f} last={w.weights[-1]:.4f} "
          f"sum={w.weights.sum():.15f}")

#%%
# Small cases can be checked by hand: K = 4, omega2 = 3 gives
# (1 - k/4)**2 normalised, i.e. 9/14, 4/14, 1/14, 0
print(beta_weights(4, omega2=3).weights * 14)

#%%
# tau for two months with every lag equal to 0.1 and 0.2
lags = np.array([[0.1] * 24, [0.2] * 24])
print(long_run_component(0.0184, 0.1855, beta_weights(24, omega2=2.8589), lags))
