"""Two-hidden-layer ReLU network for direct multi-horizon forecasting.

``out = W3^T relu(W2^T relu(W1^T x + b1) + b2) + b3`` with ``x`` holding
``p`` lags and a time index.  Inputs and outputs pass through fixed affine
scalers fitted on the training split only.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .loss import mape_grad, mape_loss

PARAM_KEYS = ("W1", "b1", "W2", "b2", "W3", "b3")


@dataclass(frozen=True)
class Scaler:
    """``(x - mean) / scale`` on the way in, the inverse on the way out."""

    mean: np.ndarray | float = 0.0
    scale: np.ndarray | float = 1.0

    def transform(self, x):
        return (x - self.mean) / self.scale

    def inverse(self, z):
        return z * self.scale + self.mean

    @classmethod
    def fit(cls, x, axis=0):
        x = np.asarray(x, dtype=np.float64)
        mean = x.mean(axis=axis)
        scale = x.std(axis=axis)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean, scale)


@dataclass(frozen=True)
class MlpForecaster:
    params: dict
    x_scaler: Scaler = field(default_factory=Scaler)
    y_scaler: Scaler = field(default_factory=Scaler)

    @property
    def n_inputs(self):
        return self.params["W1"].shape[0]

    @property
    def n_hidden(self):
        return self.params["W1"].shape[1]

    @property
    def n_outputs(self):
        return self.params["W3"].shape[1]

    @property
    def p(self):
        return self.n_inputs - 1

    def with_params(self, params):
        return replace(self, params=params)


def glorot(rng, fan_in, fan_out):
    lim = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-lim, lim, size=(fan_in, fan_out))


def init_mlp(p, n_hidden, k, seed=0):
    rng = np.random.default_rng(seed)
    params = {
        "W1": glorot(rng, p + 1, n_hidden), "b1": np.zeros(n_hidden),
        "W2": glorot(rng, n_hidden, n_hidden), "b2": np.zeros(n_hidden),
        "W3": glorot(rng, n_hidden, k), "b3": np.zeros(k),
    }
    return MlpForecaster(params)


def _check(m, x):
    if x.shape[-1] != m.n_inputs:
        raise ValueError(f"expected {m.n_inputs} input features, got {x.shape[-1]}")


def _net(params, z):
    a1 = np.maximum(z @ params["W1"] + params["b1"], 0.0)
    a2 = np.maximum(a1 @ params["W2"] + params["b2"], 0.0)
    return a2 @ params["W3"] + params["b3"], a1, a2


def mlp_forward(m, x):
    """Forecasts for one input vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    _check(m, x)
    out, _, _ = _net(m.params, m.x_scaler.transform(x))
    return m.y_scaler.inverse(out)


def mlp_backward(m, x, target):
    """MAPE loss and its exact gradient for every weight and bias.

    ``x`` is one row or an ``(m, p+1)`` batch; the loss averages over all
    batch rows and horizons.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    target = np.atleast_2d(np.asarray(target, dtype=np.float64))
    _check(m, x)
    P = m.params
    z = m.x_scaler.transform(x)
    h1 = z @ P["W1"] + P["b1"]
    a1 = np.maximum(h1, 0.0)
    h2 = a1 @ P["W2"] + P["b2"]
    a2 = np.maximum(h2, 0.0)
    out = a2 @ P["W3"] + P["b3"]
    pred = m.y_scaler.inverse(out)
    loss = mape_loss(pred, target)
    g_out = mape_grad(pred, target) * m.y_scaler.scale
    grads = {"W3": a2.T @ g_out, "b3": g_out.sum(axis=0)}
    g2 = (g_out @ P["W3"].T) * (h2 > 0)
    grads["W2"] = a1.T @ g2
    grads["b2"] = g2.sum(axis=0)
    g1 = (g2 @ P["W2"].T) * (h1 > 0)
    grads["W1"] = z.T @ g1
    grads["b1"] = g1.sum(axis=0)
    return loss, grads


def predict_multi_horizon(model, recent, p=None, t=None):
    """Direct forecasts for every horizon from the last ``p`` values.

    ``t`` is the time index fed alongside the lags; it defaults to
    ``len(recent)``, the index of the first forecast target when ``recent``
    starts at index 0.
    """
    y = np.asarray(getattr(recent, "values", recent), dtype=np.float64)
    p = model.p if p is None else p
    if y.size < p:
        raise ValueError(f"need at least {p} recent values")
    t = y.size if t is None else t
    x = np.concatenate((y[-p:], [float(t)]))
    return mlp_forward(model, x)
