import datetime as dt

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pfb.errors import DegenerateVarianceError, InsufficientDataError
from pfb.series import (TimeSeries, acf, difference, durbin_levinson, inverse_difference,
                        lag_inputs, local_level_smooth, outlier_mask, pacf, seasonal_difference,
                        sliding_window, smooth_outliers, stationarity_check, white_noise_check)
from oracles import padded_ols_ar

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def ar1(phi, n, seed, burn=200):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + burn)
    y = np.zeros(n + burn)
    for t in range(1, n + burn):
        y[t] = phi * y[t - 1] + e[t]
    return y[burn:]


# --- TimeSeries --------------------------------------------------------------

def test_timeseries_basics():
    s = TimeSeries([1, 2, 3], dt.date(2020, 2, 26), "x")
    assert len(s) == 3
    assert s.date_at(2) == dt.date(2020, 2, 28)
    with pytest.raises(ValueError):
        s.values[0] = 5
    with pytest.raises(Exception):
        TimeSeries([])


# --- differencing ------------------------------------------------------------

def test_difference_examples():
    assert list(difference([1, 3, 6], 1).values) == [2, 3]
    assert list(difference([1, 3, 6, 10], 2).values) == [1, 1]
    assert list(difference([4, 5], 0).values) == [4, 5]
    with pytest.raises(InsufficientDataError):
        difference([1, 2], 2)


def test_inverse_difference_examples():
    assert list(inverse_difference([2, 3], [1], 1).values) == [1, 3, 6]
    assert list(inverse_difference([2, 3], [], 0).values) == [2, 3]
    with pytest.raises(ValueError):
        inverse_difference([2, 3], [1, 2], 1)


@given(arrays(np.float64, st.integers(3, 40), elements=finite), st.integers(0, 2))
def test_difference_round_trip(y, d):
    back = inverse_difference(difference(y, d), y[:d], d).values
    assert np.allclose(back, y, rtol=1e-12, atol=1e-9)


def test_seasonal_difference_example_and_commutation():
    assert list(seasonal_difference(np.arange(1, 10), 1, 7).values) == [7, 7]
    assert list(seasonal_difference([3, 4], 0, 7).values) == [3, 4]
    y = np.random.default_rng(1).normal(size=60).cumsum()
    a = seasonal_difference(difference(y, 1), 1, 7).values
    b = difference(seasonal_difference(y, 1, 7), 1).values
    assert np.allclose(a, b, atol=1e-12)
    with pytest.raises(InsufficientDataError):
        seasonal_difference(np.arange(7), 1, 7)


# --- ACF / PACF --------------------------------------------------------------

@given(arrays(np.float64, st.integers(5, 60), elements=finite))
def test_acf_bounds(y):
    if np.ptp(y) < 1e-6:
        return
    r = acf(y, y.size - 1)
    assert r.rho[0] == 1.0
    assert np.all(np.abs(r.rho) <= 1 + 1e-12)
    assert np.all(r.gamma[0] >= np.abs(r.gamma) - 1e-9)


def test_acf_hand_values():
    # y = [1, 2, 3, 4]: mean 2.5, z = [-1.5, -.5, .5, 1.5]
    r = acf([1, 2, 3, 4], 2)
    assert np.allclose(r.gamma, [5.0 / 4, 1.25 / 4, -1.5 / 4])
    assert r.band == pytest.approx(1.96 / 2)


def test_acf_constant_series_rejected():
    with pytest.raises(DegenerateVarianceError):
        acf(np.full(10, 3.0), 2)


def test_acf_white_noise_inside_band():
    y = np.random.default_rng(7).standard_normal(2000)
    r = acf(y, 20)
    assert np.mean(np.abs(r.rho[1:]) < r.band) >= 0.95


def test_weekly_cycle_shows_at_lag_7(deaths):
    r = acf(deaths, 14)
    assert r.rho[7] > r.band


def test_pacf_ar1():
    y = ar1(0.6, 5000, 3)
    r = pacf(y, 20)
    assert r.rho[1] == pytest.approx(0.6, abs=0.03)
    assert np.mean(np.abs(r.rho[2:]) < r.band) >= 0.9
    assert r.rho[1] == acf(y, 20).rho[1]


def test_pacf_white_noise():
    r = pacf(np.random.default_rng(11).standard_normal(3000), 30)
    assert np.mean(np.abs(r.rho[1:]) < r.band) >= 0.95


def test_pacf_maxlag_precondition():
    with pytest.raises(InsufficientDataError):
        pacf(np.arange(10.0), 5)


def padded_ols_pacf(y, k):
    return padded_ols_ar(y, k)[-1]


@given(st.integers(0, 10**6), st.integers(20, 200), st.integers(1, 8))
def test_pacf_matches_regression_oracle(seed, n, k):
    y = np.random.default_rng(seed).normal(size=n).cumsum()
    r = pacf(y, k)
    assert r.rho[k] == pytest.approx(padded_ols_pacf(y, k), abs=1e-8)


def test_durbin_levinson_exact_theory():
    # AR(2) phi=(0.5, 0.2): rho1 = phi1/(1-phi2), rho_k = phi1 rho_{k-1} + phi2 rho_{k-2}
    rho = [1.0, 0.5 / 0.8]
    for _ in range(4):
        rho.append(0.5 * rho[-1] + 0.2 * rho[-2])
    phi, partial = durbin_levinson(rho, 2)
    assert np.allclose(phi, [0.5, 0.2], atol=1e-12)
    _, partial5 = durbin_levinson(rho, 5)
    assert np.allclose(partial5[3:], 0.0, atol=1e-12)


# --- smoothing ---------------------------------------------------------------

def local_level_oracle(y, q, missing):
    """Penalised least-squares form of the smoothed local level."""
    n = y.size
    w = (~missing).astype(float)
    D = np.diff(np.eye(n), axis=0)
    A = np.diag(w) + (1.0 / q) * D.T @ D
    return np.linalg.solve(A, w * np.where(missing, 0.0, y))


@pytest.mark.parametrize("q", [0.01, 0.1, 1.0])
def test_local_level_matches_penalised_ls(q):
    rng = np.random.default_rng(5)
    y = rng.normal(size=80).cumsum()
    missing = np.zeros(80, bool)
    missing[[10, 11, 40]] = True
    got = local_level_smooth(y, q, missing).values
    assert np.allclose(got, local_level_oracle(y, q, missing), atol=1e-4)


def test_local_level_limits():
    assert np.allclose(local_level_smooth(np.full(30, 4.0), 0.1).values, 4.0)
    y = np.random.default_rng(2).normal(size=50)
    assert np.allclose(local_level_smooth(y, 1e8).values, y, atol=1e-5)


def test_local_level_reduces_variance_on_white_noise():
    for seed in range(20):
        y = np.random.default_rng(seed).normal(size=300)
        for q in (0.1, 1.0):
            assert local_level_smooth(y, q).values.var() <= y.var()


def test_smooth_outliers_constant_and_monotone():
    c = np.full(40, 9.0)
    assert np.array_equal(smooth_outliers(c).values, c)
    m = np.linspace(0, 100, 60) ** 1.2
    assert not outlier_mask(m).any()
    assert np.array_equal(smooth_outliers(m).values, m)


def test_spike_flagged_and_replaced_within_neighbours():
    rng = np.random.default_rng(0)
    y = 100 + rng.normal(0, 5, 60)
    y[30] *= 100
    mask = outlier_mask(y)
    assert mask[30]
    out = smooth_outliers(y).values
    lo, hi = min(y[29], y[31]), max(y[29], y[31])
    assert lo - 10 <= out[30] <= hi + 10
    assert np.array_equal(out[~mask], y[~mask])


def test_neighbour_window_excludes_centre():
    # 3 before and 3 after with alternating values: std>0, centre excluded
    y = np.array([0, 1, 0, 1, 0, 1, 0, 50, 0, 1, 0, 1, 0, 1], float)
    assert outlier_mask(y, 6, 3.5)[7]


def test_smooth_outliers_preconditions():
    with pytest.raises(InsufficientDataError):
        smooth_outliers(np.arange(6.0), 6)
    with pytest.raises(ValueError):
        outlier_mask(np.arange(20.0), 5)


def test_smooth_outliers_idempotent(deaths):
    corpus = [deaths.values]
    rng = np.random.default_rng(4)
    for _ in range(5):
        y = rng.poisson(200, 120).astype(float)
        y[rng.integers(0, 120, 4)] *= rng.uniform(5, 50, 4)
        corpus.append(y)
    for y in corpus:
        once = smooth_outliers(y).values
        assert np.array_equal(smooth_outliers(once).values, once)


# --- windows -----------------------------------------------------------------

def test_sliding_window_example():
    lm = sliding_window([1, 2, 3, 4, 5], 2, 2)
    assert lm.inputs.tolist() == [[1, 2, 2], [2, 3, 3]]
    assert lm.targets.tolist() == [[3, 4], [4, 5]]


@given(st.integers(1, 10), st.integers(1, 10), st.integers(0, 30))
def test_sliding_window_shapes(p, k, extra):
    n = p + k + extra
    y = np.arange(n, dtype=float) * 1.5
    lm = sliding_window(y, p, k)
    assert lm.inputs.shape == (n - p - k + 1, p + 1)
    assert lm.targets.shape == (n - p - k + 1, k)
    assert np.array_equal(lm.targets[:, 0], y[p:n - k + 1])
    assert np.array_equal(lm.inputs[:, p], np.arange(n - p - k + 1) + p)
    assert np.array_equal(lm.inputs[:, :p], lag_inputs(y, p, lm.origins)[:, :p])


def test_sliding_window_too_short():
    with pytest.raises(InsufficientDataError):
        sliding_window([1, 2, 3], 2, 2)


# --- white noise -------------------------------------------------------------

def test_white_noise_gaussian():
    ok = [white_noise_check(np.random.default_rng(s).standard_normal(5000)).is_white
          for s in range(40)]
    assert np.mean(ok) >= 0.95


def test_white_noise_rejects_sine_and_accepts_zeros():
    d = white_noise_check(np.sin(np.arange(200.0)))
    assert not d.is_white
    assert d.lag1_autocorr == pytest.approx(np.cos(1.0), abs=0.02)
    z = white_noise_check(np.zeros(50))
    assert z.is_white and z.mean == 0 and z.variance == 0


def test_stationarity_check_on_random_walk():
    y = np.random.default_rng(9).standard_normal(2000).cumsum()
    assert stationarity_check(y).is_white
    assert not stationarity_check(np.arange(100.0) ** 2 / 50 + np.sin(np.arange(100.0))).is_white
