import numpy as np
import pytest

from pfb.errors import InsufficientDataError
from pfb.neural import (MAPE_FLOOR, TrainConfig, adam_step, gru_forward,
                        gru_predict, init_cell, init_gru_forecaster, init_mlp, init_moments,
                        mape_grad, mape_loss, mlp_forward, predict_multi_horizon, train_gru,
                        train_mlp)
from pfb.neural import checkpoint
from pfb.series import sliding_window
from gradcheck import gru_error, mlp_error


def relu(a):
    return np.maximum(a, 0)


def test_mlp_forward_matches_oracle():
    rng = np.random.default_rng(0)
    m = init_mlp(4, 6, 3, seed=1)
    P = {k: v + 0.1 * rng.standard_normal(v.shape) for k, v in m.params.items()}
    m = m.with_params(P)
    x = rng.normal(size=5)
    h1 = [max(sum(x[i] * P["W1"][i, j] for i in range(5)) + P["b1"][j], 0) for j in range(6)]
    h2 = [max(sum(h1[i] * P["W2"][i, j] for i in range(6)) + P["b2"][j], 0) for j in range(6)]
    out = [sum(h2[i] * P["W3"][i, j] for i in range(6)) + P["b3"][j] for j in range(3)]
    assert np.allclose(mlp_forward(m, x), out, atol=1e-12)
    batch = rng.normal(size=(7, 5))
    assert np.allclose(mlp_forward(m, batch)[3], mlp_forward(m, batch[3]), atol=1e-12)


def test_mlp_input_size_checked():
    with pytest.raises(ValueError):
        mlp_forward(init_mlp(3, 4, 2), np.zeros(3))


def test_mape_examples():
    assert mape_loss([110.0], [100.0]) == pytest.approx(10.0)
    assert mape_loss([90.0, 220.0], [100.0, 200.0]) == pytest.approx(10.0)
    assert mape_loss([0.5], [0.0]) == pytest.approx(50.0 / MAPE_FLOOR)
    assert np.allclose(mape_grad([110.0, 90.0], [100.0, 100.0]), [0.5, -0.5])
    assert mape_grad([5.0], [5.0])[0] == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_mlp_gradient(seed):
    assert mlp_error(seed) < 1e-4


@pytest.mark.parametrize("seed", range(5))
def test_gru_gradient(seed):
    assert gru_error(seed) < 1e-4


def test_gru_state_readout_gradient():
    assert gru_error(11, readout="state") < 1e-4


def test_adam_first_step():
    cfg = TrainConfig(lr=0.1)
    p = {"w": np.array([1.0, -2.0])}
    g = {"w": np.array([0.5, -3.0])}
    new, (m, v) = adam_step(p, g, init_moments(p), cfg, 1)
    # bias-corrected first step moves each weight by lr * sign(g)
    assert np.allclose(new["w"], [0.9, -1.9], atol=1e-6)
    assert np.allclose(m["w"], 0.1 * g["w"])
    assert np.allclose(v["w"], 0.001 * g["w"] ** 2)
    with pytest.raises(ValueError):
        adam_step(p, g, init_moments(p), cfg, 0)


def test_adam_zero_gradient_is_fixed_point():
    p = {"w": np.array([3.0])}
    new, _ = adam_step(p, {"w": np.zeros(1)}, init_moments(p), TrainConfig(), 1)
    assert new["w"][0] == 3.0


def test_train_config_validation():
    for kwargs in ({"lr": 0}, {"beta1": 1.0}, {"epochs": 0}, {"val_fraction": 1.0}):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


def series(n=120, seed=0):
    t = np.arange(n)
    return 100 + 30 * np.sin(t / 6) + np.random.default_rng(seed).normal(0, 2, n)


def test_training_deterministic():
    data = sliding_window(series(), 5, 3)
    cfg = TrainConfig(epochs=30, seed=4, batch_size=16)
    a, _ = train_mlp(data, (5, 16, 3), cfg)
    b, _ = train_mlp(data, (5, 16, 3), cfg)
    for k in a.params:
        assert np.array_equal(a.params[k], b.params[k])
    c, _ = train_mlp(data, (5, 16, 3), TrainConfig(epochs=30, seed=5, batch_size=16))
    assert not np.array_equal(a.params["W1"], c.params["W1"])


def test_mlp_overfits_single_sample():
    data = sliding_window(np.array([10.0, 20, 30, 40, 50, 60]), 4, 2)
    data = type(data)(data.inputs[:1], data.targets[:1], 4, 2, 0, data.origins[:1])
    m, hist = train_mlp(data, (4, 32, 2), TrainConfig(epochs=800, lr=1e-2, val_fraction=0.0))
    assert hist.loss[-1] < 0.5
    assert np.allclose(mlp_forward(m, data.inputs[0]), [50, 60], rtol=5e-3)


def test_mlp_training_reduces_loss():
    data = sliding_window(series(), 6, 4)
    _, hist = train_mlp(data, (6, 32, 4), TrainConfig(epochs=200, lr=3e-3))
    assert hist.loss[-1] < 0.5 * hist.loss[0]
    assert 1 <= hist.best_epoch <= 200
    assert hist.val_loss.size == 200


def test_train_mlp_rejects_bad_input():
    with pytest.raises(TypeError):
        train_mlp(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        train_mlp(sliding_window(series(), 5, 3), (4, 8, 3))


def test_predict_multi_horizon_uses_last_lags():
    m = init_mlp(3, 8, 2, seed=2)
    y = np.arange(10.0)
    assert np.allclose(predict_multi_horizon(m, y), mlp_forward(m, [7.0, 8.0, 9.0, 10.0]))
    with pytest.raises(ValueError):
        predict_multi_horizon(m, [1.0])


def test_gru_gate_limits():
    cell = init_cell(2, 3, seed=0)
    P = dict(cell.params)
    x = np.random.default_rng(1).normal(size=(5, 2))
    h0 = np.array([0.3, -0.2, 0.5])
    # update gate shut: state never changes
    closed = dict(P, beta_u=np.full(3, -1e3))
    h, states = gru_forward(closed, x, h0)
    assert np.allclose(h, h0) and np.allclose(states, h0)
    # update gate open: state is the candidate, which lies in (-1, 1)
    opened = dict(P, beta_u=np.full(3, 1e3))
    h, _ = gru_forward(opened, x, h0)
    assert np.all(np.abs(h) < 1)
    # with the reset gate shut the candidate ignores the previous state
    reset = dict(P, beta_r=np.full(3, -1e3), beta_u=np.full(3, 1e3))
    a, _ = gru_forward(reset, x[:1], h0)
    b, _ = gru_forward(reset, x[:1], -h0)
    assert np.allclose(a, b)


def test_gru_batch_matches_single():
    m = init_gru_forecaster(3, 2, 4, seed=3)
    x = np.random.default_rng(2).normal(size=(6, 4, 3))
    batch = gru_predict(m, x)
    for i in range(6):
        assert np.allclose(batch[i], gru_predict(m, x[i]))


def test_gru_outputs_are_independent():
    m = init_gru_forecaster(3, 2, 4, seed=3)
    x = np.random.default_rng(2).normal(size=(4, 3))
    base = gru_predict(m, x)
    W = m.params["Wo"].copy()
    W[1] = 0.0
    z = gru_predict(m.with_params(dict(m.params, Wo=W)), x)
    assert z[0] == base[0] and z[1] == m.params["bo"][1]


def test_train_gru_runs_and_is_deterministic():
    y = series(90)
    cfg = TrainConfig(epochs=20, seed=1)
    a, hist = train_gru(y, 4, 3, cfg, seq_len=5)
    b, _ = train_gru(y, 4, 3, cfg, seq_len=5)
    assert np.array_equal(a.params["Theta"], b.params["Theta"])
    assert hist.loss.size == 20
    with pytest.raises(InsufficientDataError):
        train_gru(y[:8], 4, 3, cfg, seq_len=5)


def test_checkpoint_round_trip(tmp_path):
    data = sliding_window(series(), 5, 3)
    mlp, _ = train_mlp(data, (5, 8, 3), TrainConfig(epochs=5))
    gru, _ = train_gru(series(), 4, 3, TrainConfig(epochs=5), seq_len=5)
    for model, x in ((mlp, data.inputs[:3]), (gru, np.ones((2, 5, 4)))):
        checkpoint.save(model, tmp_path / "m.json")
        back = checkpoint.load(tmp_path / "m.json")
        assert type(back) is type(model)
        f = mlp_forward if isinstance(model, type(mlp)) else gru_predict
        assert np.array_equal(f(back, x), f(model, x))
    doc = checkpoint.to_dict(mlp)
    doc["format_version"] = 99
    with pytest.raises(ValueError):
        checkpoint.from_dict(doc)
