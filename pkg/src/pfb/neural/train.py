"""Seeded ADAM training loops for the MLP and GRU forecasters."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DivergenceError, InsufficientDataError
from ..series import LagMatrix, values_of
from .adam import TrainConfig, adam_step, init_moments
from .gru import gru_loss_and_grads, gru_sequences, init_gru_forecaster
from .mlp import Scaler, init_mlp, mlp_backward


@dataclass(frozen=True)
class TrainHistory:
    loss: np.ndarray
    val_loss: np.ndarray
    best_epoch: int

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("epoch", "loss", "val_loss"))
            for i, l in enumerate(self.loss):
                v = self.val_loss[i] if self.val_loss.size else ""
                w.writerow((i + 1, repr(float(l)), "" if v == "" else repr(float(v))))
        return path


def _split_rows(n_rows, val_fraction):
    n_val = int(round(n_rows * val_fraction)) if n_rows >= 10 else 0
    return n_rows - n_val, n_val


def _adam_loop(model, lossgrad, x, y, xv, yv, config):
    rng = np.random.default_rng(config.seed + 1)
    params = model.params
    moments = init_moments(params)
    n = x.shape[0]
    bs = n if not config.batch_size else min(config.batch_size, n)
    losses = np.empty(config.epochs)
    vals = np.empty(config.epochs if xv is not None else 0)
    best, best_val, best_epoch = params, np.inf, config.epochs
    t = 0
    for epoch in range(config.epochs):
        order = np.arange(n) if bs == n else rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            loss, grads = lossgrad(model.with_params(params), x[idx], y[idx])
            if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
                raise DivergenceError(f"non-finite loss at epoch {epoch + 1}", epoch=epoch + 1)
            t += 1
            params, moments = adam_step(params, grads, moments, config, t)
            epoch_loss += loss * idx.size
        losses[epoch] = epoch_loss / n
        if xv is not None:
            v, _ = lossgrad(model.with_params(params), xv, yv)
            vals[epoch] = v
            if v < best_val:
                best, best_val, best_epoch = params, v, epoch + 1
    if xv is None:
        best = params
    return model.with_params(best), TrainHistory(losses, vals, best_epoch)


def train_mlp(data, arch=None, config=None, standardize=True):
    """Fit the two-hidden-layer network on a sliding-window design.

    The last ``config.val_fraction`` of rows is held out; the returned model
    carries the weights of the epoch with the lowest validation loss.
    Scalers are fitted on the remaining training rows only.
    """
    config = config or TrainConfig()
    if not isinstance(data, LagMatrix):
        raise TypeError("train_mlp expects a LagMatrix")
    if len(data) < 1:
        raise InsufficientDataError("no training rows")
    p, n_hidden, k = arch if arch is not None else (data.p, 1024, data.k)
    if p != data.p or k != data.k:
        raise ValueError("architecture does not match the data's (p, k)")
    n_tr, n_val = _split_rows(len(data), config.val_fraction)
    x, y = data.inputs[:n_tr], data.targets[:n_tr]
    xv = data.inputs[n_tr:] if n_val else None
    yv = data.targets[n_tr:] if n_val else None
    model = init_mlp(p, n_hidden, k, config.seed)
    if standardize:
        model = type(model)(model.params, Scaler.fit(x),
                            Scaler(float(y.mean()), float(y.std()) or 1.0))
    return _adam_loop(model, mlp_backward, x, y, xv, yv, config)


def gru_design(s, p, k, seq_len, origins=None):
    """(sequences, targets, origins) for every origin with full targets."""
    y = values_of(s)
    lo = seq_len - 2 + p
    if origins is None:
        origins = np.arange(lo, y.size - k)
    origins = np.asarray(origins, dtype=int)
    if origins.size == 0:
        raise InsufficientDataError("series too short for this GRU design")
    seqs = gru_sequences(y, p, seq_len, origins)
    tgt = y[origins[:, None] + 1 + np.arange(k)[None, :]]
    return seqs, tgt, origins


def train_gru(s, p, k, config=None, seq_len=7, hidden=None, readout="affine",
              standardize=True):
    config = config or TrainConfig()
    seqs, tgt, _ = gru_design(s, p, k, seq_len)
    n_tr, n_val = _split_rows(seqs.shape[0], config.val_fraction)
    x, y = seqs[:n_tr], tgt[:n_tr]
    xv = seqs[n_tr:] if n_val else None
    yv = tgt[n_tr:] if n_val else None
    model = init_gru_forecaster(p, k, seq_len, hidden, readout, config.seed)
    if standardize:
        model = type(model)(model.params, p, k, seq_len, readout,
                            Scaler(float(x.mean()), float(x.std()) or 1.0),
                            Scaler(float(y.mean()), float(y.std()) or 1.0))
    return _adam_loop(model, gru_loss_and_grads, x, y, xv, yv, config)
