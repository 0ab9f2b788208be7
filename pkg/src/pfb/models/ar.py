"""AR(p) fitted through the Yule-Walker equations.

Coefficients are stored lag-1 first: ``phi[0]`` multiplies ``z[t-1]``.  The
reversed convention that writes the oldest lag first maps as
``reversed_phi[j] = phi[p-1-j]``.
"""
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DegenerateVarianceError, InsufficientDataError, NumericalError
from ..series import acf, durbin_levinson, values_of


@dataclass(frozen=True)
class ArModel:
    p: int
    mean: float
    phi: np.ndarray
    sigma2: float
    stationary: bool

    def reversed_phi(self):
        return self.phi[::-1].copy()


def is_stationary(ar_coefs):
    """True when every root of ``1 - sum ar_i B^i`` lies outside the unit circle."""
    ar_coefs = np.asarray(ar_coefs, dtype=np.float64)
    if ar_coefs.size == 0 or not np.any(ar_coefs):
        return True
    poly = np.concatenate(([1.0], -ar_coefs))
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1.0))


def yule_walker(rho, p):
    """Solve ``R phi = rho[1..p]`` for the Toeplitz matrix of ``rho[0..p-1]``."""
    rho = np.asarray(rho, dtype=np.float64)
    if rho.size < p + 1:
        raise ValueError("need autocorrelations up to lag p")
    if p == 0:
        return np.zeros(0)
    try:
        phi, _ = durbin_levinson(rho, p)
    except DegenerateVarianceError as exc:
        raise NumericalError(f"singular Yule-Walker system: {exc}") from None
    # Levinson only breaks down at exact singularity; guard the near case too
    r = rho[np.abs(np.subtract.outer(np.arange(p), np.arange(p)))]
    if np.linalg.cond(r) > 1e12 or not np.all(np.isfinite(phi)):
        raise NumericalError("singular Yule-Walker system")
    return phi


def fit_ar_yule_walker(s, p):
    y = values_of(s)
    n = y.size
    if n <= 2 * p:
        raise InsufficientDataError(f"need more than {2 * p} values for AR({p})")
    res = acf(y, p)
    phi = yule_walker(res.rho, p)
    mu = float(y.mean())
    z = y - mu
    e = kernels.css_residuals(z, phi, np.zeros(0), 0.0)[p:]
    sigma2 = float(np.mean(e ** 2)) if e.size else 0.0
    return ArModel(p, mu, phi, sigma2, is_stationary(phi))


def forecast_ar(m, history, h):
    y = values_of(history)
    if y.size < m.p:
        raise InsufficientDataError(f"AR({m.p}) needs {m.p} values of history")
    z = y - m.mean
    f = kernels.arma_forecast(z, np.zeros_like(z), m.phi, np.zeros(0), 0.0, h)
    return f + m.mean
