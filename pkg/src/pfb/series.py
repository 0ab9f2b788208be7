"""Daily series container and the preprocessing/diagnostic toolbox.

Everything here is a pure function of its inputs.  Functions accept either a
:class:`TimeSeries` or any 1-d array-like and return new objects.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DataError, DegenerateVarianceError, InsufficientDataError


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly daily-spaced observations starting at ``start_date``."""

    values: np.ndarray
    start_date: dt.date | None = None
    name: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if v.size < 1:
            raise DataError("a TimeSeries needs at least one value")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def date_at(self, i):
        if self.start_date is None:
            return None
        return self.start_date + dt.timedelta(days=int(i))

    def dates(self):
        return [self.date_at(i) for i in range(len(self))]

    def shifted(self, values, offset=0):
        """New series with ``values`` whose first entry sits ``offset`` days in."""
        start = self.date_at(offset) if self.start_date is not None else None
        return TimeSeries(values, start, self.name)


def values_of(s):
    if isinstance(s, TimeSeries):
        return s.values
    return np.asarray(s, dtype=np.float64).reshape(-1)


def _wrap(like, values, offset=0):
    if isinstance(like, TimeSeries):
        return like.shifted(values, offset)
    return TimeSeries(values)


# ---------------------------------------------------------------------------
# differencing
# ---------------------------------------------------------------------------

def difference(s, d=1):
    """Apply ``(1 - B)`` ``d`` times; the result is ``d`` values shorter."""
    y = values_of(s)
    if d < 0:
        raise ValueError("d must be non-negative")
    if y.size <= d:
        raise InsufficientDataError(f"need more than {d} values to difference {d} times")
    return _wrap(s, np.diff(y, n=d) if d else y.copy(), d)


def inverse_difference(diff, anchors, d=1):
    """Undo :func:`difference` given the ``d`` leading values it dropped."""
    anchors = np.asarray(anchors, dtype=np.float64).reshape(-1)
    if anchors.size != d:
        raise ValueError(f"expected {d} anchors, got {anchors.size}")
    w = values_of(diff)
    if d == 0:
        return _wrap(diff, w.copy())
    # first value of each difference level, taken from the anchors
    heads = [np.diff(anchors, n=k)[0] for k in range(d)]
    for k in range(d - 1, -1, -1):
        w = np.concatenate(([heads[k]], heads[k] + np.cumsum(w)))
    start = None
    if isinstance(diff, TimeSeries) and diff.start_date is not None:
        start = diff.start_date - dt.timedelta(days=d)
    return TimeSeries(w, start, getattr(diff, "name", ""))


def seasonal_difference(s, D=1, period=7):
    """Apply ``(1 - B^period)`` ``D`` times."""
    y = values_of(s)
    if period < 2:
        raise ValueError("seasonal period must be at least 2")
    if D < 0:
        raise ValueError("D must be non-negative")
    if y.size <= D * period:
        raise InsufficientDataError(
            f"need more than {D * period} values for {D} seasonal differences")
    for _ in range(D):
        y = y[period:] - y[:-period]
    return _wrap(s, y.copy(), D * period)


def differencing_polynomial(d, D, period):
    """Coefficients of ``(1 - B)^d (1 - B^period)^D``, lowest power first."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    if D:
        seas = np.zeros(period + 1)
        seas[0], seas[-1] = 1.0, -1.0
        for _ in range(D):
            poly = np.convolve(poly, seas)
    return poly


def integrate_forecasts(w_future, history, d, D, period):
    """Map forecasts of the differenced series back to the original scale.

    ``history`` is the original-scale data up to the forecast origin; each
    forecast is reconstructed from the differencing polynomial and the
    values (observed or already reconstructed) before it.
    """
    poly = differencing_polynomial(d, D, period)
    order = poly.size - 1
    w_future = np.asarray(w_future, dtype=np.float64)
    if order == 0:
        return w_future.copy()
    hist = values_of(history)
    if hist.size < order:
        raise InsufficientDataError("history shorter than the differencing span")
    buf = list(hist[-order:])
    out = np.empty(w_future.size)
    for i, wv in enumerate(w_future):
        recent = np.asarray(buf[-order:][::-1])
        val = wv - float(np.dot(poly[1:], recent))
        out[i] = val
        buf.append(val)
    return out


# ---------------------------------------------------------------------------
# autocorrelation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcfResult:
    """Correlogram values for lags ``0..maxlag``.

    For :func:`pacf` the ``rho`` field holds partial autocorrelations; ``gamma``
    is always the biased sample autocovariance.
    """

    lags: np.ndarray
    rho: np.ndarray
    gamma: np.ndarray
    band: float

    def significant(self):
        """Lags (excluding 0) whose correlation lies outside the band."""
        mask = np.abs(self.rho) > self.band
        mask[0] = False
        return self.lags[mask]


def autocovariance(y, maxlag):
    y = values_of(y)
    n = y.size
    z = y - y.mean()
    return np.array([np.dot(z[k:], z[:n - k]) / n for k in range(maxlag + 1)])


def acf(s, maxlag=40):
    y = values_of(s)
    n = y.size
    if maxlag >= n:
        raise InsufficientDataError("maxlag must be smaller than the series length")
    gamma = autocovariance(y, maxlag)
    if gamma[0] <= 0.0:
        raise DegenerateVarianceError("constant series has no autocorrelation")
    return AcfResult(np.arange(maxlag + 1), gamma / gamma[0], gamma, 1.96 / np.sqrt(n))


def durbin_levinson(rho, order):
    """Levinson recursion on autocorrelations ``rho[0..order]``.

    Returns ``(phi, partial)`` where ``phi`` are the order-``order`` AR
    coefficients (lag 1 first) and ``partial[k]`` is the lag-k partial
    autocorrelation (``partial[0] = 1``).
    """
    rho = np.asarray(rho, dtype=np.float64)
    partial = np.zeros(order + 1)
    partial[0] = 1.0
    phi = np.zeros(order)
    v = 1.0
    for k in range(1, order + 1):
        num = rho[k] - np.dot(phi[:k - 1], rho[k - 1:0:-1])
        if v <= 0.0:
            raise DegenerateVarianceError("autocorrelation sequence is singular")
        kk = num / v
        prev = phi[:k - 1].copy()
        phi[:k - 1] = prev - kk * prev[::-1]
        phi[k - 1] = kk
        partial[k] = kk
        v *= 1.0 - kk * kk
    return phi, partial


def pacf(s, maxlag=40):
    y = values_of(s)
    n = y.size
    if maxlag >= n / 2:
        raise InsufficientDataError("pacf needs maxlag below half the series length")
    base = acf(y, maxlag)
    _, partial = durbin_levinson(base.rho, maxlag)
    return AcfResult(base.lags, partial, base.gamma, base.band)


# ---------------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------------

def local_level_smooth(s, q_ratio=0.1, missing=None):
    """Fixed-interval smoothed level of ``y_t = mu_t + eps``, ``mu_t = mu_{t-1} + eta``.

    ``q_ratio`` is var(eta)/var(eps).  Points flagged in ``missing`` are
    treated as unobserved.
    """
    y = values_of(s)
    if y.size == 0:
        raise InsufficientDataError("empty series")
    if q_ratio <= 0:
        raise ValueError("q_ratio must be positive")
    if missing is None:
        missing = np.zeros(y.size, dtype=bool)
    return _wrap(s, kernels.local_level(y, missing, q_ratio))


def outlier_mask(s, window=6, k_sigma=3.5):
    """Points further than ``k_sigma`` neighbour-stds from the neighbour mean."""
    y = values_of(s)
    if window < 2 or window % 2:
        raise ValueError("window must be an even number >= 2")
    if k_sigma <= 0:
        raise ValueError("k_sigma must be positive")
    if y.size < window + 1:
        raise InsufficientDataError(f"need at least {window + 1} values")
    mean, std = kernels.neighbor_stats(y, window // 2)
    dev = np.abs(y - mean)
    return dev > k_sigma * std


def smooth_outliers(s, window=6, k_sigma=3.5, q_ratio=0.1, max_iter=20):
    """Replace outliers by the local level smoother's estimate.

    Flagged points are treated as missing when smoothing, so a spike cannot
    pull its own replacement.  Detection repeats on the cleaned series until
    nothing new is flagged, which makes the operation idempotent.
    """
    y0 = values_of(s)
    mask = outlier_mask(y0, window, k_sigma)
    y = y0
    for _ in range(max_iter):
        if not mask.any():
            break
        level = kernels.local_level(y0, mask, q_ratio)
        y = np.where(mask, level, y0)
        new = outlier_mask(y, window, k_sigma)
        if not new.any():
            break
        mask = mask | new
    return _wrap(s, np.array(y, copy=True))


# ---------------------------------------------------------------------------
# supervised windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LagMatrix:
    """Sliding-window design for direct multi-horizon models.

    Row ``i`` holds ``y[i..i+p-1]`` followed by the time index ``i + p + t0``;
    its targets are ``y[i+p .. i+p+k-1]``.
    """

    inputs: np.ndarray
    targets: np.ndarray
    p: int
    k: int
    t0: int = 0
    origins: np.ndarray = field(default=None)

    def __len__(self):
        return self.inputs.shape[0]


def lag_inputs(y, p, origins, t0=0):
    """Input rows whose last lag is ``y[origin]`` for each origin."""
    y = values_of(y)
    origins = np.asarray(origins, dtype=int)
    if origins.size and (origins.min() < p - 1 or origins.max() >= y.size):
        raise InsufficientDataError("origin outside the range that has p lags")
    idx = origins[:, None] + np.arange(-p + 1, 1)[None, :]
    x = np.empty((origins.size, p + 1))
    x[:, :p] = y[idx]
    x[:, p] = origins + 1 + t0
    return x


def sliding_window(s, p, k, t0=0):
    y = values_of(s)
    n = y.size
    if p < 1 or k < 1:
        raise ValueError("p and k must be positive")
    if n < p + k:
        raise InsufficientDataError(f"need at least p + k = {p + k} values")
    m = n - p - k + 1
    origins = np.arange(m) + p - 1
    x = lag_inputs(y, p, origins, t0)
    tidx = origins[:, None] + 1 + np.arange(k)[None, :]
    return LagMatrix(x, y[tidx].copy(), p, k, t0, origins)


# ---------------------------------------------------------------------------
# residual diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseDiagnostics:
    mean: float
    variance: float
    lag1_autocorr: float
    is_white: bool


def white_noise_check(residuals, mean_tol=3.0, corr_band_mult=3.0):
    """Zero-mean and lag-1 uncorrelatedness check.

    White when ``|mean| <= mean_tol * std / sqrt(n)`` and
    ``|rho_1| <= corr_band_mult / sqrt(n)``.  The default multipliers of 3
    keep the joint false-rejection rate under 1% for Gaussian noise.
    """
    e = values_of(residuals)
    n = e.size
    if n < 30:
        raise InsufficientDataError("white_noise_check needs at least 30 values")
    mean = float(e.mean())
    var = float(e.var())
    z = e - mean
    g0 = float(np.dot(z, z))
    r1 = float(np.dot(z[1:], z[:-1]) / g0) if g0 > 0 else 0.0
    std = np.sqrt(var)
    ok_mean = abs(mean) <= mean_tol * std / np.sqrt(n)
    ok_corr = abs(r1) <= corr_band_mult / np.sqrt(n)
    return NoiseDiagnostics(mean, var, r1, bool(ok_mean and ok_corr))


def stationarity_check(s, **kwargs):
    """White-noise diagnostics of the first differences (random-walk test)."""
    return white_noise_check(difference(s, 1), **kwargs)
