import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pfb import _accel, kernels

pytestmark = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")


def both(fn, *args):
    with _accel.use_backend("numba"):
        a = fn(*args)
    with _accel.use_backend("numpy"):
        b = fn(*args)
    return a, b


def close(a, b, rtol=1e-10, atol=1e-10):
    if isinstance(a, tuple):
        for x, y in zip(a, b):
            close(x, y, rtol, atol)
        return
    np.testing.assert_allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                               rtol=rtol, atol=atol, equal_nan=True)


coef = st.floats(-0.9, 0.9)


@given(st.integers(0, 2**31), st.lists(coef, max_size=4), st.lists(coef, max_size=3),
       st.floats(-5, 5))
def test_css_residuals(seed, ar, ma, const):
    w = np.random.default_rng(seed).normal(size=80)
    close(*both(kernels.css_residuals, w, np.array(ar), np.array(ma), const))


@given(st.integers(0, 2**31), st.lists(coef, max_size=4), st.lists(coef, max_size=3),
       st.integers(1, 20))
def test_arma_forecast(seed, ar, ma, h):
    rng = np.random.default_rng(seed)
    w, e = rng.normal(size=50), rng.normal(size=50)
    close(*both(kernels.arma_forecast, w, e, np.array(ar), np.array(ma), 0.3, h))


@given(st.integers(0, 2**31), st.floats(1e-4, 10.0))
def test_local_level(seed, q):
    rng = np.random.default_rng(seed)
    y = rng.normal(size=60).cumsum()
    missing = rng.random(60) < 0.1
    close(*both(kernels.local_level, y, missing, q), rtol=1e-8, atol=1e-8)


@given(st.integers(0, 2**31), st.integers(1, 7))
def test_neighbor_stats(seed, half):
    y = np.random.default_rng(seed).normal(size=40)
    close(*both(kernels.neighbor_stats, y, half))


@given(st.integers(0, 2**31), st.integers(0, 200))
def test_epi_simulate(seed, steps):
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0, 1000, 6)
    q = rng.uniform(0, 0.5, 5)
    theta = np.concatenate(([rng.uniform(0, 2)], q))
    close(*both(kernels.epi_simulate, x0, theta, x0.sum(), steps))


def test_backend_switch():
    prev = _accel.backend()
    with _accel.use_backend("numpy"):
        assert _accel.backend() == "numpy"
    assert _accel.backend() == prev
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


@pytest.mark.parametrize("flag,want", [("1", "numpy"), ("0", "numba"), ("", "numba")])
def test_env_flag_selects_backend(flag, want):
    out = subprocess.run([sys.executable, "-c", "from pfb import _accel; print(_accel.backend())"],
                         env={**os.environ, "PFB_DISABLE_JIT": flag},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == want
