"""Multiplicative SARIMA fitted by conditional sum of squares (CSS).

The series is seasonally differenced ``D`` times, then regularly differenced
``d`` times.  The seasonal and non-seasonal AR and MA polynomials are
multiplied out into long non-seasonal polynomials and the ARMA recursion

    w_t = delta + sum_i a_i w_{t-i} + sum_j b_j e_{t-j} + e_t

is run with the first ``len(a)`` shocks conditioned to zero.  ``a`` comes
from ``(1 - sum phi_i B^i)(1 - sum Phi_k B^{k s}) = 1 - sum a_i B^i`` and
``b`` from ``(1 + sum theta_j B^j)(1 + sum Theta_k B^{k s})``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .. import kernels
from ..errors import (ConvergenceError, DegenerateFitError, InsufficientDataError,
                      NumericalError)
from ..series import (acf, difference, differencing_polynomial, integrate_forecasts,
                      seasonal_difference, values_of)
from .ar import is_stationary, yule_walker

# residual magnitude substituted when a trial parameter vector blows up
_BLOWUP = 1e12


@dataclass(frozen=True)
class ModelOrder:
    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 0

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q", "s"):
            if getattr(self, name) < 0:
                raise ValueError(f"order component {name} must be >= 0")
        if self.P + self.D + self.Q > 0 and self.s < 2:
            raise ValueError("seasonal terms need a season length s >= 2")

    @property
    def seasonal(self):
        return self.P + self.D + self.Q > 0

    @property
    def ar_span(self):
        return self.p + self.P * self.s

    @property
    def ma_span(self):
        return self.q + self.Q * self.s

    @property
    def diff_span(self):
        return self.d + self.D * self.s

    @property
    def n_params(self):
        return self.p + self.q + self.P + self.Q + 1

    def as_tuple(self):
        return (self.p, self.d, self.q, self.P, self.D, self.Q, self.s)

    def __str__(self):
        base = f"({self.p},{self.d},{self.q})"
        if self.seasonal:
            base += f"x({self.P},{self.D},{self.Q})_{self.s}"
        return base


@dataclass(frozen=True)
class SarimaModel:
    order: ModelOrder
    intercept: float
    phi: np.ndarray
    theta: np.ndarray
    sphi: np.ndarray
    stheta: np.ndarray
    sigma2: float
    sse: float = 0.0
    n_obs: int = 0
    aic: float = float("nan")
    stationary: bool = True
    converged: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def ar_poly(self):
        return expand_ar(self.phi, self.sphi, self.order.s)

    def ma_poly(self):
        return expand_ma(self.theta, self.stheta, self.order.s)

    @property
    def log_likelihood(self):
        """Gaussian log-likelihood implied by the CSS variance estimate."""
        if self.n_obs == 0 or self.sigma2 <= 0:
            return float("nan")
        n = self.n_obs
        return -0.5 * n * (np.log(2 * np.pi * self.sigma2) + 1.0)


def _poly_mul(a, b):
    return np.convolve(a, b)


def expand_ar(phi, sphi, s):
    """Recursion coefficients ``a`` (lag 1 first) of the multiplied AR polynomial."""
    phi = np.asarray(phi, dtype=np.float64)
    sphi = np.asarray(sphi, dtype=np.float64)
    reg = np.concatenate(([1.0], -phi))
    seas = np.zeros(sphi.size * s + 1)
    seas[0] = 1.0
    if sphi.size:
        seas[s::s] = -sphi
    full = _poly_mul(reg, seas)
    return -full[1:]


def expand_ma(theta, stheta, s):
    """Shock coefficients ``b`` (lag 1 first) of the multiplied MA polynomial."""
    theta = np.asarray(theta, dtype=np.float64)
    stheta = np.asarray(stheta, dtype=np.float64)
    reg = np.concatenate(([1.0], theta))
    seas = np.zeros(stheta.size * s + 1)
    seas[0] = 1.0
    if stheta.size:
        seas[s::s] = stheta
    return _poly_mul(reg, seas)[1:]


def aic(sse, n_obs, n_params):
    """Gaussian CSS surrogate ``n ln(sse/n) + 2k``."""
    if sse <= 0:
        raise DegenerateFitError("AIC undefined for a zero or negative SSE")
    if n_obs <= 0:
        raise ValueError("n_obs must be positive")
    return n_obs * np.log(sse / n_obs) + 2 * n_params


def apply_differencing(s, order):
    """Seasonal differencing first, then regular differencing."""
    y = values_of(s)
    if order.D:
        y = values_of(seasonal_difference(y, order.D, order.s))
    if order.d:
        y = values_of(difference(y, order.d))
    return y


def _split(params, order):
    p, q, P, Q = order.p, order.q, order.P, order.Q
    delta = params[0]
    i = 1
    phi = params[i:i + p]; i += p
    theta = params[i:i + q]; i += q
    sphi = params[i:i + P]; i += P
    stheta = params[i:i + Q]
    return delta, phi, theta, sphi, stheta


def _residuals(params, w, order):
    delta, phi, theta, sphi, stheta = _split(params, order)
    a = expand_ar(phi, sphi, order.s)
    b = expand_ma(theta, stheta, order.s)
    e = kernels.css_residuals(w, a, b, delta)[a.size:]
    if not np.all(np.isfinite(e)):
        e = np.nan_to_num(e, nan=_BLOWUP, posinf=_BLOWUP, neginf=-_BLOWUP)
    return np.clip(e, -_BLOWUP, _BLOWUP)


def _initial_params(w, order, start=None):
    if start is not None:
        return np.asarray(start, dtype=np.float64).copy()
    phi = np.zeros(order.p)
    if order.p:
        try:
            phi = yule_walker(acf(w, order.p).rho, order.p)
        except Exception:  # constant or singular differenced series
            phi = np.zeros(order.p)
    delta = float(w.mean()) * (1.0 - phi.sum())
    return np.concatenate(([delta], phi, np.zeros(order.q + order.P + order.Q)))


def _fit_lm(w, order, x0, max_nfev, xtol):
    res = optimize.least_squares(_residuals, x0, args=(w, order), method="lm",
                                 xtol=xtol, ftol=1e-12, gtol=1e-12, max_nfev=max_nfev)
    return res.x, res.status > 0


def _fit_nelder_mead(w, order, x0, max_iter, xtol):
    def sse(x):
        e = _residuals(x, w, order)
        return float(np.dot(e, e))

    x, ok = x0, False
    for _ in range(2):  # one restart from the first optimum
        res = optimize.minimize(sse, x, method="Nelder-Mead",
                                options={"maxiter": max_iter, "xatol": xtol,
                                         "fatol": 1e-10, "adaptive": True})
        x, ok = res.x, bool(res.success)
    return x, ok


def min_length(order):
    """Shortest series ``fit_sarima`` accepts for ``order``."""
    return order.D * order.s + order.d + 2 * max(order.ar_span, order.q, 1) + 1


def fit_sarima(s, order, method="lm", start=None, max_iter=2000, xtol=1e-7,
               raise_on_failure=True):
    """CSS estimate of a (multiplicative seasonal) ARIMA model.

    ``method`` is ``"lm"`` (Levenberg-Marquardt on the residual vector) or
    ``"nelder-mead"``.  ``start`` optionally seeds the parameter vector
    ``[delta, phi, theta, Phi, Theta]``, e.g. with a previous fit.
    """
    y = values_of(s)
    need = min_length(order)
    if y.size < need:
        raise InsufficientDataError(f"SARIMA{order} needs at least {need} values, got {y.size}")
    w = apply_differencing(y, order)
    x0 = _initial_params(w, order, start)
    if x0.size != order.n_params:
        raise ValueError("start vector does not match the model order")
    if order.n_params == 1 and order.ar_span == 0:
        # pure intercept: closed form
        x, ok = np.array([w.mean()]), True
    elif method == "lm":
        x, ok = _fit_lm(w, order, x0, max_iter * (order.n_params + 1), xtol)
    elif method == "nelder-mead":
        x, ok = _fit_nelder_mead(w, order, x0, max_iter, xtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    model = _assemble(x, w, order, ok)
    if not ok and raise_on_failure:
        raise ConvergenceError(f"CSS fit of SARIMA{order} did not converge", best=model)
    return model


def _assemble(x, w, order, converged):
    delta, phi, theta, sphi, stheta = _split(np.asarray(x, dtype=np.float64), order)
    e = _residuals(x, w, order)
    sse = float(np.dot(e, e))
    n = e.size
    sigma2 = sse / n if n else 0.0
    a = expand_ar(phi, sphi, order.s)
    try:
        crit = aic(sse, n, order.n_params)
    except DegenerateFitError:
        crit = -np.inf
    return SarimaModel(order, float(delta), phi.copy(), theta.copy(), sphi.copy(), stheta.copy(),
                       sigma2, sse, n, float(crit), is_stationary(a), bool(converged))


def fit_arima(s, order, **kwargs):
    if order.seasonal:
        raise ValueError("fit_arima takes a non-seasonal order; use fit_sarima")
    return fit_sarima(s, order, **kwargs)


def forecast_sarima(m, history, h):
    """Iterated forecasts on the differenced scale, integrated back."""
    y = values_of(history)
    order = m.order
    a, b = m.ar_poly(), m.ma_poly()
    if y.size < order.diff_span + max(a.size, 1):
        raise InsufficientDataError("history too short for this model's memory")
    w = apply_differencing(y, order)
    e = kernels.css_residuals(w, a, b, m.intercept)
    wf = kernels.arma_forecast(w, e, a, b, m.intercept, h)
    return integrate_forecasts(wf, y, order.d, order.D, order.s)


def in_sample_predictions(m, s):
    """One-step predictions on the original scale (NaN where undefined).

    These are the predictions whose errors CSS minimises: ``y_t`` minus the
    conditioned residual, for every ``t`` past the differencing and AR spans.
    """
    y = values_of(s)
    order = m.order
    a, b = m.ar_poly(), m.ma_poly()
    w = apply_differencing(y, order)
    e = kernels.css_residuals(w, a, b, m.intercept)
    start = order.diff_span
    out = np.full(y.size, np.nan)
    r = a.size
    out[start + r:] = y[start + r:] - e[r:]
    return out


def fitted_polynomials(m):
    """(differencing, AR, MA) polynomials lowest power first, for reporting."""
    o = m.order
    return (differencing_polynomial(o.d, o.D, o.s),
            np.concatenate(([1.0], -m.ar_poly())),
            np.concatenate(([1.0], m.ma_poly())))


def select_order_aic(s, orders, **fit_kwargs):
    """Fit every order and return ``(best_model, {order: aic})``.

    Orders whose fit fails are skipped; ties keep the earlier order.
    """
    scores, best = {}, None
    for order in orders:
        try:
            m = fit_sarima(s, order, **fit_kwargs)
        except (NumericalError, InsufficientDataError):
            continue
        scores[order] = m.aic
        if best is None or m.aic < best.aic:
            best = m
    if best is None:
        raise NumericalError("no order in the grid could be fitted")
    return best, scores
