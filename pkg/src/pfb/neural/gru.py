"""Gated recurrent unit with hand-written backpropagation through time.

    r_t = sigmoid(Psi   [h_{t-1}, x_t] + beta_r)
    u_t = sigmoid(Phi   [h_{t-1}, x_t] + beta_u)
    c_t = tanh   (Theta [r_t * h_{t-1}, x_t] + beta_h)
    h_t = (1 - u_t) * h_{t-1} + u_t * c_t

The forecast is read from the final state, either through an affine head
(default) or as the leading components of ``h`` (``readout="state"``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .loss import mape_grad, mape_loss
from .mlp import Scaler, glorot

CELL_KEYS = ("Psi", "Phi", "Theta", "beta_r", "beta_u", "beta_h")


def sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


@dataclass(frozen=True)
class GruCell:
    params: dict

    @property
    def hidden(self):
        return self.params["Psi"].shape[0]

    @property
    def n_inputs(self):
        return self.params["Psi"].shape[1] - self.hidden


@dataclass(frozen=True)
class GruForecaster:
    params: dict           # cell parameters plus head "Wo", "bo" when readout == "affine"
    p: int
    k: int
    seq_len: int
    readout: str = "affine"
    x_scaler: Scaler = field(default_factory=Scaler)
    y_scaler: Scaler = field(default_factory=Scaler)

    @property
    def cell(self):
        return GruCell({key: self.params[key] for key in CELL_KEYS})

    def with_params(self, params):
        return replace(self, params=params)


def init_cell(n_inputs, hidden=None, seed=0):
    hidden = n_inputs if hidden is None else hidden
    rng = np.random.default_rng(seed)
    fan = hidden + n_inputs
    params = {
        "Psi": glorot(rng, fan, hidden).T.copy(),
        "Phi": glorot(rng, fan, hidden).T.copy(),
        "Theta": glorot(rng, fan, hidden).T.copy(),
        "beta_r": np.zeros(hidden),
        "beta_u": np.zeros(hidden),
        "beta_h": np.zeros(hidden),
    }
    return GruCell(params)


def init_gru_forecaster(p, k, seq_len=7, hidden=None, readout="affine", seed=0):
    hidden = p if hidden is None else hidden
    cell = init_cell(p, hidden, seed)
    params = dict(cell.params)
    if readout == "affine":
        rng = np.random.default_rng(seed + 7919)
        params["Wo"] = glorot(rng, hidden, k).T.copy()
        params["bo"] = np.zeros(k)
    elif readout == "state":
        if k > hidden:
            raise ValueError("state readout needs k <= hidden size")
    else:
        raise ValueError(f"unknown readout {readout!r}")
    return GruForecaster(params, p, k, seq_len, readout)


def _as_batch(x_seq):
    x = np.asarray(x_seq, dtype=np.float64)
    if x.ndim == 2:
        return x[None], True
    if x.ndim != 3:
        raise ValueError("x_seq must be (L, n_inputs) or (batch, L, n_inputs)")
    return x, False


def gru_forward(cell, x_seq, h0=None, keep_cache=False):
    """Run the cell over a sequence; returns ``(h_T, states)``.

    ``x_seq`` is ``(L, n_inputs)`` or ``(batch, L, n_inputs)``; ``states``
    has the matching shape with the hidden size in the last axis.
    """
    P = cell.params if isinstance(cell, GruCell) else cell
    H = P["Psi"].shape[0]
    x, single = _as_batch(x_seq)
    B, L, nin = x.shape
    if nin != P["Psi"].shape[1] - H:
        raise ValueError(f"expected {P['Psi'].shape[1] - H} inputs per step, got {nin}")
    h = np.zeros((B, H)) if h0 is None else np.broadcast_to(
        np.asarray(h0, dtype=np.float64), (B, H)).copy()
    states = np.empty((B, L, H))
    cache = []
    for t in range(L):
        xt = x[:, t]
        hx = np.concatenate((h, xt), axis=1)
        r = sigmoid(hx @ P["Psi"].T + P["beta_r"])
        u = sigmoid(hx @ P["Phi"].T + P["beta_u"])
        rhx = np.concatenate((r * h, xt), axis=1)
        c = np.tanh(rhx @ P["Theta"].T + P["beta_h"])
        h_new = (1.0 - u) * h + u * c
        if keep_cache:
            cache.append((h, hx, r, u, rhx, c))
        h = h_new
        states[:, t] = h
    if single:
        out = (h[0], states[0])
    else:
        out = (h, states)
    return (out, cache) if keep_cache else out


def gru_backward_cell(P, cache, dh_T):
    """Gradients of the cell parameters given ``dL/dh_T`` (batch x hidden)."""
    H = P["Psi"].shape[0]
    g = {k: np.zeros_like(P[k]) for k in CELL_KEYS}
    dh = dh_T
    for h_prev, hx, r, u, rhx, c in reversed(cache):
        dc = dh * u
        du = dh * (c - h_prev)
        dh_prev = dh * (1.0 - u)
        dac = dc * (1.0 - c * c)
        g["Theta"] += dac.T @ rhx
        g["beta_h"] += dac.sum(axis=0)
        drh = (dac @ P["Theta"])[:, :H]
        dr = drh * h_prev
        dh_prev += drh * r
        dau = du * u * (1.0 - u)
        g["Phi"] += dau.T @ hx
        g["beta_u"] += dau.sum(axis=0)
        dh_prev += (dau @ P["Phi"])[:, :H]
        dar = dr * r * (1.0 - r)
        g["Psi"] += dar.T @ hx
        g["beta_r"] += dar.sum(axis=0)
        dh_prev += (dar @ P["Psi"])[:, :H]
        dh = dh_prev
    return g


def _readout(m, h):
    if m.readout == "affine":
        return h @ m.params["Wo"].T + m.params["bo"]
    return h[:, :m.k]


def gru_predict(m, x_seq):
    x, single = _as_batch(x_seq)
    h, _ = gru_forward(m.params, m.x_scaler.transform(x))
    out = m.y_scaler.inverse(_readout(m, h))
    return out[0] if single else out


def gru_loss_and_grads(m, x_seq, target):
    x, _ = _as_batch(x_seq)
    target = np.atleast_2d(np.asarray(target, dtype=np.float64))
    (h, _), cache = gru_forward(m.params, m.x_scaler.transform(x), keep_cache=True)
    out = _readout(m, h)
    pred = m.y_scaler.inverse(out)
    loss = mape_loss(pred, target)
    g_out = mape_grad(pred, target) * m.y_scaler.scale
    grads = {}
    if m.readout == "affine":
        grads["Wo"] = g_out.T @ h
        grads["bo"] = g_out.sum(axis=0)
        dh = g_out @ m.params["Wo"]
    else:
        dh = np.zeros_like(h)
        dh[:, :m.k] = g_out
    grads.update(gru_backward_cell(m.params, cache, dh))
    return loss, grads


def gru_sequences(y, p, seq_len, origins):
    """Input sequences ending at each origin.

    Step ``j`` of the sequence for origin ``o`` feeds
    ``[y_{t-1}, ..., y_{t-p}]`` with ``t = o - seq_len + 2 + j``, so the last
    step sees ``y_o`` first.
    """
    y = np.asarray(y, dtype=np.float64)
    origins = np.asarray(origins, dtype=int)
    first = origins.min() - seq_len + 2 - p if origins.size else 0
    if first < 0:
        raise ValueError("origin too early for this lag order and sequence length")
    steps = origins[:, None] - seq_len + 2 + np.arange(seq_len)[None, :]      # t values
    lags = steps[:, :, None] - 1 - np.arange(p)[None, None, :]               # t-1 .. t-p
    return y[lags]
