"""Half-day augmentation: interleave SARIMA-based midpoints with observations.

Position ``2t`` of the augmented series is ``y_t``; position ``2t+1`` is
``(y_t + yhat_{t+1}) / 2`` where ``yhat_{t+1}`` is a one-step SARIMA forecast.
A series of ``n`` points becomes ``2n - 1`` points.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, InsufficientDataError
from .models.sarima import (ModelOrder, fit_sarima, forecast_sarima, in_sample_predictions,
                            min_length)
from .series import TimeSeries, values_of

BASE_ORDER = ModelOrder(1, 0, 0, 3, 1, 1, 7)


@dataclass(frozen=True)
class AugmentedSeries:
    values: np.ndarray
    base_model: str
    n_original: int
    failed_refits: tuple = ()      # origins where a base refit failed and the last model was kept

    def __len__(self):
        return self.values.shape[0]

    @property
    def observed_mask(self):
        m = np.zeros(self.values.size, dtype=bool)
        m[::2] = True
        return m

    def original_index(self, i):
        """Original index for an even position, None for interpolated ones."""
        return i // 2 if i % 2 == 0 else None

    def observed(self):
        return self.values[::2].copy()

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("index", "value", "origin"))
            for i, v in enumerate(self.values):
                w.writerow((i, repr(float(v)), "observed" if i % 2 == 0 else "interpolated"))
        return path


def de_augment(aug):
    return aug.observed()


def generate_base_forecasts(s, order=BASE_ORDER, kt=5, fit_end=None, split=None):
    """One-step forecasts ``f[j]`` of ``y[j+1]`` for ``j = 0..n-2``.

    Returns ``(f, failed)``.

    Targets ``1..split`` take in-sample one-step predictions of a model fitted
    on ``y[:fit_end]`` (the whole series by default).  Later targets are
    out-of-sample: at origin ``o`` the forecast comes from a model fitted on
    the ``split`` values ending at the most recent refit origin (refitted every
    ``kt`` origins).  Where the conditional in-sample prediction is undefined
    (the first differencing-plus-AR span) the previous observation is used.
    If the in-sample fit fails ``ConvergenceError`` propagates; a failed
    out-of-sample refit keeps the previous model and its origin is listed in
    ``failed``.
    """
    y = values_of(s)
    n = y.size
    period = max(order.s, 1)
    if n < 4 * period:
        raise InsufficientDataError("augmentation needs at least four seasonal periods")
    fit_end = n if fit_end is None else int(fit_end)
    split = n // 2 if split is None else int(split)
    split = min(split, fit_end - 1)
    if not 1 <= split <= n - 1:
        raise ValueError("split must lie inside the series")
    width = max(split, min_length(order))
    if min_length(order) > split + 1 or fit_end < min_length(order):
        raise InsufficientDataError(
            f"augmentation with SARIMA{order} needs about {2 * min_length(order)} points")
    out = np.empty(n - 1)

    full = fit_sarima(y[:fit_end], order)
    pred = in_sample_predictions(full, y[:fit_end])
    for t in range(1, split + 1):
        out[t - 1] = pred[t] if np.isfinite(pred[t]) else y[t - 1]

    model, failed = None, []
    for step, o in enumerate(range(split, n - 1)):
        if step % kt == 0:
            try:
                model = fit_sarima(y[max(0, o - width + 1):o + 1], order)
            except ConvergenceError:
                if model is None:
                    raise
                failed.append(o)
        out[o] = forecast_sarima(model, y[:o + 1], 1)[0]
    return out, tuple(failed)


def interleave(s, forecasts, base_model=str(BASE_ORDER), failed_refits=()):
    y = values_of(s)
    f = np.asarray(forecasts, dtype=np.float64)
    if f.size != y.size - 1:
        raise ValueError(f"expected {y.size - 1} forecasts, got {f.size}")
    out = np.empty(2 * y.size - 1)
    out[::2] = y
    out[1::2] = 0.5 * (y[:-1] + f)
    return AugmentedSeries(out, base_model, y.size, tuple(failed_refits))


def augment(s, order=BASE_ORDER, kt=5, fit_end=None, split=None):
    f, failed = generate_base_forecasts(s, order, kt, fit_end, split)
    return interleave(s, f, "SARIMA" + str(order), failed)


def as_timeseries(aug, name="augmented"):
    return TimeSeries(aug.values, None, name)
