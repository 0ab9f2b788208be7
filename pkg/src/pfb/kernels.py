"""Hot numeric loops, each with a numba and a numpy implementation.

The public functions dispatch on :func:`pfb._accel.backend`.  Both paths
compute the same quantities in float64 and are tested against each other.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import lfilter

from . import _accel
from ._accel import njit

# diffuse prior variance for the local level state, in units of the
# observation noise variance
DIFFUSE_VARIANCE = 1e7


# ---------------------------------------------------------------------------
# ARMA recursion (conditional sum of squares)
# ---------------------------------------------------------------------------

@njit
def _css_residuals_numba(w, ar, ma, const):
    n = w.shape[0]
    r = ar.shape[0]
    m = ma.shape[0]
    e = np.zeros(n)
    for t in range(r, n):
        acc = w[t] - const
        for i in range(r):
            acc -= ar[i] * w[t - 1 - i]
        for j in range(m):
            k = t - 1 - j
            if k >= r:
                acc -= ma[j] * e[k]
        e[t] = acc
    return e


def _css_residuals_numpy(w, ar, ma, const):
    n = w.shape[0]
    r = ar.shape[0]
    e = np.zeros(n)
    if n <= r:
        return e
    u = w[r:] - const
    if r:
        # row t-r holds w[t-r .. t-1]; reverse ar so lag 1 meets w[t-1]
        lags = sliding_window_view(w[:-1], r)
        u = u - lags @ ar[::-1]
    if ma.shape[0]:
        u = lfilter([1.0], np.concatenate(([1.0], ma)), u)
    e[r:] = u
    return e


def css_residuals(w, ar, ma, const):
    """One-step residuals of ``w`` under an ARMA recursion.

    ``ar[i]`` multiplies ``w[t-1-i]`` and ``ma[j]`` multiplies ``e[t-1-j]``.
    The first ``len(ar)`` residuals are conditioned to zero and excluded
    from the sum of squares by the caller.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    ar = np.ascontiguousarray(ar, dtype=np.float64)
    ma = np.ascontiguousarray(ma, dtype=np.float64)
    if _accel.backend() == "numba":
        return _css_residuals_numba(w, ar, ma, float(const))
    return _css_residuals_numpy(w, ar, ma, float(const))


@njit
def _arma_forecast_numba(w, e, ar, ma, const, h):
    n = w.shape[0]
    r = ar.shape[0]
    m = ma.shape[0]
    ww = np.empty(n + h)
    ee = np.zeros(n + h)
    ww[:n] = w
    ee[:n] = e
    for t in range(n, n + h):
        acc = const
        for i in range(r):
            acc += ar[i] * ww[t - 1 - i]
        for j in range(m):
            k = t - 1 - j
            if k >= 0:
                acc += ma[j] * ee[k]
        ww[t] = acc
    return ww[n:]


def _arma_forecast_numpy(w, e, ar, ma, const, h):
    r = ar.shape[0]
    m = ma.shape[0]
    ww = list(w[-r:]) if r else []
    ee = list(np.concatenate((np.zeros(m), e))[-m:]) if m else []
    out = np.empty(h)
    for k in range(h):
        acc = const
        if r:
            acc += float(np.dot(ar, ww[::-1][:r]))
        if m:
            acc += float(np.dot(ma, ee[::-1][:m]))
        out[k] = acc
        ww.append(acc)
        ee.append(0.0)
    return out


def arma_forecast(w, e, ar, ma, const, h):
    """Iterate the ARMA recursion ``h`` steps past the end of ``w``.

    Future shocks are zero; ``e`` supplies the residuals aligned with ``w``.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    ar = np.ascontiguousarray(ar, dtype=np.float64)
    ma = np.ascontiguousarray(ma, dtype=np.float64)
    if w.shape[0] < ar.shape[0]:
        raise ValueError("history shorter than the AR memory")
    if _accel.backend() == "numba":
        return _arma_forecast_numba(w, e, ar, ma, float(const), int(h))
    return _arma_forecast_numpy(w, e, ar, ma, float(const), int(h))


# ---------------------------------------------------------------------------
# Local level model: Kalman filter + fixed-interval smoother
# ---------------------------------------------------------------------------

@njit
def _local_level_numba(y, missing, q):
    n = y.shape[0]
    a = 0.0
    for t in range(n):
        if not missing[t]:
            a = y[t]
            break
    p = DIFFUSE_VARIANCE
    af = np.empty(n)
    pf = np.empty(n)
    pp = np.empty(n)
    for t in range(n):
        pp[t] = p
        if missing[t]:
            af[t] = a
            pf[t] = p
        else:
            k = p / (p + 1.0)
            af[t] = a + k * (y[t] - a)
            pf[t] = p * (1.0 - k)
        a = af[t]
        p = pf[t] + q
    s = np.empty(n)
    s[n - 1] = af[n - 1]
    for t in range(n - 2, -1, -1):
        c = pf[t] / pp[t + 1]
        s[t] = af[t] + c * (s[t + 1] - af[t])
    return s


def _local_level_numpy(y, missing, q):
    n = y.shape[0]
    observed = np.flatnonzero(~missing)
    a = float(y[observed[0]]) if observed.size else 0.0
    p = DIFFUSE_VARIANCE
    af = np.empty(n)
    pf = np.empty(n)
    pp = np.empty(n)
    for t in range(n):
        pp[t] = p
        if missing[t]:
            af[t], pf[t] = a, p
        else:
            k = p / (p + 1.0)
            af[t] = a + k * (y[t] - a)
            pf[t] = p * (1.0 - k)
        a = af[t]
        p = pf[t] + q
    s = np.empty(n)
    s[-1] = af[-1]
    gain = pf[:-1] / pp[1:]
    for t in range(n - 2, -1, -1):
        s[t] = af[t] + gain[t] * (s[t + 1] - af[t])
    return s


def local_level(y, missing, q):
    """Smoothed level means of the local level model with noise ratio ``q``.

    Entries with ``missing[t]`` set skip the measurement update, so the
    smoother interpolates across them.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    missing = np.ascontiguousarray(missing, dtype=np.bool_)
    if _accel.backend() == "numba":
        return _local_level_numba(y, missing, float(q))
    return _local_level_numpy(y, missing, float(q))


# ---------------------------------------------------------------------------
# Rolling neighbour statistics (centre excluded)
# ---------------------------------------------------------------------------

@njit
def _neighbor_stats_numba(y, half):
    n = y.shape[0]
    mean = np.empty(n)
    std = np.empty(n)
    for t in range(n):
        lo = max(0, t - half)
        hi = min(n - 1, t + half)
        cnt = 0
        acc = 0.0
        for j in range(lo, hi + 1):
            if j != t:
                acc += y[j]
                cnt += 1
        mu = acc / cnt
        ss = 0.0
        for j in range(lo, hi + 1):
            if j != t:
                ss += (y[j] - mu) ** 2
        mean[t] = mu
        std[t] = np.sqrt(ss / (cnt - 1)) if cnt > 1 else 0.0
    return mean, std


def _neighbor_stats_numpy(y, half):
    padded = np.concatenate((np.full(half, np.nan), y, np.full(half, np.nan)))
    win = sliding_window_view(padded, 2 * half + 1).copy()
    win[:, half] = np.nan
    cnt = np.sum(~np.isnan(win), axis=1)
    mean = np.nanmean(win, axis=1)
    ss = np.nansum((win - mean[:, None]) ** 2, axis=1)
    std = np.where(cnt > 1, np.sqrt(ss / np.maximum(cnt - 1, 1)), 0.0)
    return mean, std


def neighbor_stats(y, half):
    """Mean and sample std of ``y[t-half..t+half]`` without ``y[t]``."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    if _accel.backend() == "numba":
        return _neighbor_stats_numba(y, int(half))
    return _neighbor_stats_numpy(y, int(half))


# ---------------------------------------------------------------------------
# SEI2RD difference equations
# ---------------------------------------------------------------------------

@njit
def _epi_simulate_numba(x0, theta, n_pop, steps):
    traj = np.empty((steps + 1, 6))
    traj[0] = x0
    alpha = theta[0]
    q1 = theta[1]
    q2 = theta[2]
    q3 = theta[3]
    q4 = theta[4]
    q5 = theta[5]
    keep_i = max(0.0, 1.0 - q2 - q3)
    keep_h = max(0.0, 1.0 - q4 - q5)
    clamped = 0
    for t in range(1, steps + 1):
        s = traj[t - 1, 0]
        e = traj[t - 1, 1]
        i = traj[t - 1, 2]
        ih = traj[t - 1, 3]
        r = traj[t - 1, 4]
        d = traj[t - 1, 5]
        inf = alpha * (i + ih) / n_pop * s
        if inf > s:
            inf = s
            clamped += 1
        onset = q1 * e
        traj[t, 0] = s - inf
        traj[t, 1] = e - onset + inf
        traj[t, 2] = i * keep_i + onset
        traj[t, 3] = ih * keep_h + q2 * i
        traj[t, 4] = r + q3 * i + q4 * ih
        traj[t, 5] = d + q5 * ih
    return traj, clamped


def _epi_simulate_numpy(x0, theta, n_pop, steps):
    traj = np.empty((steps + 1, 6))
    traj[0] = x0
    alpha, q1, q2, q3, q4, q5 = (float(v) for v in theta)
    keep_i = max(0.0, 1.0 - q2 - q3)
    keep_h = max(0.0, 1.0 - q4 - q5)
    clamped = 0
    for t in range(1, steps + 1):
        s, e, i, ih, r, d = traj[t - 1]
        inf = alpha * (i + ih) / n_pop * s
        if inf > s:
            inf = s
            clamped += 1
        onset = q1 * e
        traj[t] = (s - inf, e - onset + inf, i * keep_i + onset,
                   ih * keep_h + q2 * i, r + q3 * i + q4 * ih, d + q5 * ih)
    return traj, clamped


def epi_simulate(x0, theta, n_pop, steps):
    """Iterate the SEI2RD update ``steps`` times.

    ``x0`` is (S, E, I, IH, R, D); ``theta`` is (alpha, q1..q5).  Returns the
    ``(steps + 1, 6)`` trajectory and how many steps had to cap the new
    infections at the susceptible pool.
    """
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    if _accel.backend() == "numba":
        return _epi_simulate_numba(x0, theta, float(n_pop), int(steps))
    return _epi_simulate_numpy(x0, theta, float(n_pop), int(steps))
