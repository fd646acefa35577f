"""
Beta lag polynomials and the MIDAS long-run variance component.

The weight on lag ``k = 1..K`` is proportional to
``(k/K)**(omega1 - 1) * (1 - k/K)**(omega2 - 1)``. With ``omega1 = 1`` and
``omega2 > 1`` the weights decay in ``k`` and the oldest lag (``k = K``)
receives exactly zero weight; no ``k/(K+1)`` re-indexing is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from garchmidas.errors import InvalidShape, NonPositiveTau

__all__ = ["WeightVector", "beta_weights", "long_run_component", "weighted_lags"]


@dataclass(frozen=True, eq=False)
class WeightVector:
    weights: np.ndarray
    omega1: float
    omega2: float

    def __len__(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


def _log_kernel(u, exponent):
    # exponent * log(u), with 0 * log(0) := 0 so that omega == 1 is exactly flat
    if exponent == 0:
        return np.zeros_like(u)
    with np.errstate(divide="ignore"):
        return exponent * np.log(u)


def beta_weights(n_lags: int, omega1: float = 1.0, omega2: float = 1.0) -> WeightVector:
    """
    Normalised Beta lag weights ``phi_1, ..., phi_K``.

    Parameters
    ----------
    n_lags : int
        Number of monthly lags ``K``.
    omega1, omega2 : float
        Shape parameters, both at least 1. ``omega1 = 1`` gives the
        one-parameter decaying scheme.

    Returns
    -------
    WeightVector
        Non-negative weights summing to one; ``weights[k - 1]`` multiplies
        the regressor ``k`` months back.
    """
    if int(n_lags) != n_lags or n_lags < 1:
        raise InvalidShape(f"n_lags must be a positive integer, got {n_lags}")
    if not (omega1 >= 1 and omega2 >= 1):
        raise InvalidShape(f"omega1 and omega2 must be >= 1, got ({omega1}, {omega2})")
    n_lags = int(n_lags)
    u = np.arange(1, n_lags + 1) / n_lags
    # evaluated in logs so very large shapes do not underflow to all-zero
    log_raw = _log_kernel(u, omega1 - 1.0) + _log_kernel(1.0 - u, omega2 - 1.0)
    top = log_raw.max()
    if not np.isfinite(top):
        # K = 1 with omega2 > 1: the single lag is the only place for the mass
        return WeightVector(np.ones(n_lags), float(omega1), float(omega2))
    raw = np.exp(log_raw - top)
    return WeightVector(raw / raw.sum(), float(omega1), float(omega2))


def weighted_lags(weights, lags) -> np.ndarray:
    """``sum_k phi_k X_{t-k}`` for every period (row) of ``lags``."""
    w = np.asarray(weights, dtype=float)
    lags = np.atleast_2d(np.asarray(lags, dtype=float))
    if lags.shape[1] != w.size:
        raise ValueError(f"lag rows have {lags.shape[1]} entries, weights {w.size}")
    # row-wise reduction: a month's value must not depend on how many rows
    # share the call (a BLAS matmul can round differently by block size)
    return (lags * w).sum(axis=1)


def long_run_component(m: float, theta: float, weights, lags,
                       check: bool = True, link: str = "level") -> np.ndarray:
    """
    Monthly long-run variance ``tau_t = m + theta * sum_k phi_k X_{t-k}``.

    ``link="exp"`` gives the optional ``exp(m + theta * ...)`` variant; it
    is not the default model. With ``check`` set, any ``tau_t <= 0`` raises
    :class:`NonPositiveTau` naming the offending period rows.
    """
    x = weighted_lags(weights, lags)
    if link == "level":
        tau = m + theta * x
    elif link == "exp":
        tau = np.exp(m + theta * x)
    else:
        raise ValueError(f"unknown link {link!r}")
    if check:
        bad = np.flatnonzero(~(tau > 0))
        if bad.size:
            raise NonPositiveTau(
                f"tau <= 0 in {bad.size} period(s), first at row {bad[0]}", periods=bad
            )
    return tau
