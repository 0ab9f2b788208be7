"""Lagged time-series regression and VAR, both by ordinary least squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CollinearityError, InsufficientDataError
from ..series import values_of


def _ols(X, Y):
    coef, _, rank, _ = np.linalg.lstsq(X, Y, rcond=None)
    if rank < X.shape[1]:
        raise CollinearityError(
            f"design matrix is rank deficient ({rank} < {X.shape[1]} columns)")
    return coef


@dataclass(frozen=True)
class RegressionTsModel:
    """``y_t = b0 + sum phi_i y_{t-i} + sum b_j x_{t-l_j} + c1 t + c2 t^2``."""

    intercept: float
    phi: np.ndarray
    b: np.ndarray
    x_lags: tuple
    time_coefs: np.ndarray
    sigma2: float
    columns: tuple

    @property
    def lags(self):
        return self.phi.size


def _design(y, x, lags, x_lags, n_time):
    n = y.size
    start = max([lags] + [l for l in x_lags])
    t = np.arange(start, n, dtype=np.float64)
    cols = [np.ones(t.size)]
    names = ["const"]
    for i in range(1, lags + 1):
        cols.append(y[start - i:n - i])
        names.append(f"y_lag{i}")
    if x is not None:
        for l in x_lags:
            cols.append(x[start - l:n - l])
            names.append(f"x_lag{l}")
    for k in range(1, n_time + 1):
        cols.append(t ** k)
        names.append("t" if k == 1 else f"t^{k}")
    return np.column_stack(cols), y[start:], tuple(names)


def fit_regression_ts(y, x=None, lags=1, x_lags=(0, 1), quadratic_time=False,
                      time_trend=None):
    """OLS fit of a regression with lagged response and predictor.

    Without a predictor the default design is ``(1, y_{t-1}, t)``, plus
    ``t^2`` when ``quadratic_time`` is set.  ``time_trend=False`` drops the
    time columns altogether.
    """
    yv = values_of(y)
    xv = None if x is None else values_of(x)
    if xv is not None and xv.size != yv.size:
        raise ValueError("y and x must have equal length")
    if time_trend is None:
        time_trend = x is None or quadratic_time
    n_time = (2 if quadratic_time else 1) if time_trend else 0
    x_lags = tuple(int(l) for l in x_lags) if xv is not None else ()
    X, target, names = _design(yv, xv, lags, x_lags, n_time)
    if X.shape[0] <= X.shape[1] + 2:
        raise InsufficientDataError("not enough rows after lag trimming")
    coef = _ols(X, target)
    resid = target - X @ coef
    i = 1
    phi = coef[i:i + lags]; i += lags
    b = coef[i:i + len(x_lags)]; i += len(x_lags)
    tc = coef[i:i + n_time]
    return RegressionTsModel(float(coef[0]), phi.copy(), b.copy(), x_lags, tc.copy(),
                             float(np.mean(resid ** 2)), names)


def regression_residuals(m, y, x=None):
    yv = values_of(y)
    xv = None if x is None else values_of(x)
    X, target, _ = _design(yv, xv, m.lags, m.x_lags, m.time_coefs.size)
    coef = np.concatenate(([m.intercept], m.phi, m.b, m.time_coefs))
    return target - X @ coef, X


def forecast_regression_ts(m, history, h, x_future=None, x_history=None):
    """Iterated forecasts; predictor values must be supplied when the model has them."""
    y = list(values_of(history))
    if len(y) < m.lags:
        raise InsufficientDataError("history shorter than the lag order")
    xs = None
    if m.b.size:
        if x_future is None or x_history is None:
            raise ValueError("model uses a predictor series; pass x_history and x_future")
        xs = list(values_of(x_history)) + list(values_of(x_future))
    out = np.empty(h)
    for k in range(h):
        t = len(y)
        val = m.intercept
        for i in range(1, m.lags + 1):
            val += m.phi[i - 1] * y[t - i]
        if xs is not None:
            for coef, l in zip(m.b, m.x_lags):
                val += coef * xs[t - l]
        for j, c in enumerate(m.time_coefs, start=1):
            val += c * float(t) ** j
        out[k] = val
        y.append(val)
    return out


@dataclass(frozen=True)
class VarModel:
    """``y_t = delta + Phi[0] y_{t-p} + ... + Phi[p-1] y_{t-1} + eps_t``."""

    n: int
    p: int
    delta: np.ndarray
    Phi: np.ndarray   # (p, n, n); Phi[l] multiplies y_{t-p+l}
    sigma: np.ndarray

    def lag_matrix(self, lag):
        """Coefficient matrix for ``y_{t-lag}`` (``lag`` in 1..p)."""
        return self.Phi[self.p - lag]


def _stack(series):
    arrs = [values_of(s) for s in series]
    if len({a.size for a in arrs}) != 1:
        raise ValueError("all series must have equal length")
    return np.column_stack(arrs)


def fit_var(series, p):
    Y = _stack(series)
    T, n = Y.shape
    if T <= n * p + 2:
        raise InsufficientDataError("series too short for this VAR order")
    rows = T - p
    X = np.ones((rows, 1 + n * p))
    # block l holds y_{t-p+l}, matching Phi[l]
    for l in range(p):
        X[:, 1 + l * n:1 + (l + 1) * n] = Y[l:l + rows]
    target = Y[p:]
    coef = _ols(X, target)                    # (1 + n p, n)
    delta = coef[0]
    Phi = np.stack([coef[1 + l * n:1 + (l + 1) * n].T for l in range(p)])
    resid = target - X @ coef
    sigma = resid.T @ resid / rows
    return VarModel(n, p, delta.copy(), Phi, sigma)


def forecast_var(m, history, h):
    Y = _stack(history)
    if Y.shape[0] < m.p:
        raise InsufficientDataError("history shorter than the VAR order")
    if Y.shape[1] != m.n:
        raise ValueError("history has the wrong number of variables")
    buf = list(Y[-m.p:])
    out = np.empty((h, m.n))
    for k in range(h):
        val = m.delta.copy()
        for l in range(m.p):
            val += m.Phi[l] @ buf[len(buf) - m.p + l]
        out[k] = val
        buf.append(val)
    return out
