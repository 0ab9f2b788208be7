import numpy as np
import pytest
from hypothesis import given, strategies as st

from pfb.augmentation import (BASE_ORDER, AugmentedSeries, augment, de_augment,
                              generate_base_forecasts, interleave)
from pfb.errors import ConvergenceError, InsufficientDataError
from pfb.models import fit_sarima, in_sample_predictions, min_length
from synth import death_curve


@pytest.fixture(scope="module")
def y():
    return death_curve(240, seed=3).astype(float)


def test_interleave_example():
    aug = interleave([10.0, 20.0], [18.0])
    assert list(aug.values) == [10.0, 14.0, 20.0]
    assert list(interleave(np.full(4, 5.0), np.full(3, 5.0)).values) == [5.0] * 7


def test_interleave_count_checked():
    with pytest.raises(ValueError):
        interleave([1.0, 2.0, 3.0], [1.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50), st.integers(0, 2**31))
def test_structure(values, seed):
    y = np.array(values)
    f = np.random.default_rng(seed).normal(size=y.size - 1)
    aug = interleave(y, f)
    assert len(aug) == 2 * y.size - 1
    assert np.array_equal(aug.values[::2], y)
    assert np.array_equal(de_augment(aug), y)
    assert np.allclose(aug.values[1::2], (y[:-1] + f) / 2)
    assert aug.observed_mask.sum() == y.size
    assert aug.original_index(4) == 2 and aug.original_index(5) is None


def test_augment_real_shape(y):
    aug = augment(y, kt=5, split=120)
    assert len(aug) == 2 * y.size - 1
    assert np.array_equal(aug.values[::2], y)
    assert aug.base_model == "SARIMA" + str(BASE_ORDER)
    assert np.all(np.isfinite(aug.values))


def test_in_sample_half_uses_one_model(y):
    f, _ = generate_base_forecasts(y, split=120, fit_end=150)
    m = fit_sarima(y[:150], BASE_ORDER)
    pred = in_sample_predictions(m, y[:150])
    for t in range(1, 121):
        want = pred[t] if np.isfinite(pred[t]) else y[t - 1]
        assert f[t - 1] == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_out_of_sample_half_has_no_leakage(y):
    split = 120
    base, _ = generate_base_forecasts(y, split=split, fit_end=split)
    rng = np.random.default_rng(0)
    for _ in range(4):
        k = int(rng.integers(split + 1, y.size))
        z = y.copy()
        z[k] += 0.5 * y.std()
        g, _ = generate_base_forecasts(z, split=split, fit_end=split)
        # forecasts at origins before k saw none of the perturbed data
        assert np.array_equal(g[:k], base[:k])
        assert not np.array_equal(g[k:], base[k:])


def test_fit_end_bounds_the_in_sample_fit(y):
    a, _ = generate_base_forecasts(y, split=120, fit_end=130)
    z = y.copy()
    z[140:] += np.random.default_rng(1).normal(0, 0.2 * y.std(), y.size - 140)
    b, _ = generate_base_forecasts(z, split=120, fit_end=130)
    assert np.array_equal(a[:139], b[:139])


def test_deterministic(y):
    assert np.array_equal(augment(y, split=120).values, augment(y, split=120).values)


def test_too_short():
    with pytest.raises(InsufficientDataError):
        augment(np.arange(20.0))
    n = 2 * min_length(BASE_ORDER) - 4
    with pytest.raises(InsufficientDataError):
        augment(death_curve(n, seed=1).astype(float))


def test_csv_export(tmp_path):
    aug = AugmentedSeries(np.array([1.0, 1.5, 2.0]), "x", 2)
    text = aug.write_csv(tmp_path / "a.csv").read_text().splitlines()
    assert text == ["index,value,origin", "0,1.0,observed", "1,1.5,interpolated",
                    "2,2.0,observed"]


def test_failed_refit_keeps_previous_model(y, monkeypatch):
    import pfb.augmentation as A
    real = A.fit_sarima
    calls = []

    def flaky(window, order):
        calls.append(window.size)
        if len(calls) > 2:
            raise ConvergenceError("injected", best=None)
        return real(window, order)

    monkeypatch.setattr(A, "fit_sarima", flaky)
    f, failed = generate_base_forecasts(y, split=120)
    assert len(failed) == len(range(120, y.size - 1, 5)) - 1
    assert np.all(np.isfinite(f))
    calls.clear()
    assert augment(y, split=120).failed_refits == failed
    calls.extend([0, 0, 0])
    with pytest.raises(ConvergenceError):
        generate_base_forecasts(y, split=120)
