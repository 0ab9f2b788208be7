"""Rolling-origin multi-horizon backtesting, sMAPE and report tables.

A statistical family is refitted every ``kt`` origins on a fixed-width
window that slides forward one value per origin.  A direct (neural) family
is trained once on the training split.  Either way the forecast made at
origin ``o`` only ever receives ``y[:o+1]``.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .augmentation import augment
from .errors import InsufficientDataError, NumericalError, PfbError
from .models.ar import fit_ar_yule_walker, forecast_ar
from .models.regression import fit_regression_ts, forecast_regression_ts
from .models.sarima import ModelOrder, fit_sarima, forecast_sarima, in_sample_predictions
from .models.simple import ses_levels, ses_select_alpha
from .neural.adam import TrainConfig
from .neural.gru import gru_predict, gru_sequences
from .neural.mlp import mlp_forward
from .neural.train import train_gru, train_mlp
from .series import lag_inputs, sliding_window, values_of


def smape(actual, forecast):
    """Symmetric MAPE on the 0..200 scale; a 0/0 term counts as 0."""
    a = np.asarray(actual, dtype=np.float64).ravel()
    f = np.asarray(forecast, dtype=np.float64).ravel()
    if a.size != f.size:
        raise ValueError(f"length mismatch: {a.size} actuals vs {f.size} forecasts")
    if a.size == 0:
        raise ValueError("smape needs at least one pair")
    num = np.abs(a - f)
    den = np.abs(a) + np.abs(f)
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(200.0 * ratio.mean())


@dataclass(frozen=True)
class RollingConfig:
    train_fraction: float = 0.6
    kt: int = 5
    horizons: int = 14
    skip_tail_for_direct: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.kt < 1:
            raise ValueError("kt must be >= 1")
        if self.horizons < 1:
            raise ValueError("horizons must be >= 1")

    def n_train(self, n):
        return int(np.floor(self.train_fraction * n))


# ---------------------------------------------------------------------------
# model families
# ---------------------------------------------------------------------------

class Family:
    """Refitted family: ``fit`` on a window, ``forecast`` from a history.

    The history handed to ``forecast`` starts where the fitted window
    started and ends at the forecast origin.
    """

    name = "model"
    direct = False

    def fit(self, window, previous=None):
        return None

    def forecast(self, model, history, H):
        raise NotImplementedError

    def in_sample(self, model, window):
        """One-step predictions aligned with ``window`` (NaN where undefined)."""
        raise NotImplementedError


@dataclass(frozen=True)
class RandomWalk(Family):
    name = "RW"

    def forecast(self, model, history, H):
        return np.full(H, history[-1])

    def in_sample(self, model, window):
        out = np.full(window.size, np.nan)
        out[1:] = window[:-1]
        return out


@dataclass(frozen=True)
class Ses(Family):
    alpha: float | None = None
    name = "SES"

    def fit(self, window, previous=None):
        return ses_select_alpha(window) if self.alpha is None else float(self.alpha)

    def forecast(self, alpha, history, H):
        return np.full(H, ses_levels(history, alpha)[-1])

    def in_sample(self, alpha, window):
        out = np.full(window.size, np.nan)
        out[1:] = ses_levels(window, alpha)[:-1]
        return out


@dataclass(frozen=True)
class Ar(Family):
    p: int = 1
    name = "AR"

    def fit(self, window, previous=None):
        return fit_ar_yule_walker(window, self.p)

    def forecast(self, model, history, H):
        return forecast_ar(model, history, H)

    def in_sample(self, model, window):
        out = np.full(window.size, np.nan)
        z = window - model.mean
        for t in range(self.p, window.size):
            out[t] = model.mean + np.dot(model.phi, z[t - 1::-1][:self.p])
        return out


@dataclass(frozen=True)
class Sarima(Family):
    order: ModelOrder = ModelOrder(1, 0, 0)
    warm_start: bool = False

    @property
    def name(self):
        return ("SARIMA" if self.order.seasonal else "ARIMA") + str(self.order)

    def fit(self, window, previous=None):
        start = None
        if self.warm_start and previous is not None:
            m = previous
            start = np.concatenate(([m.intercept], m.phi, m.theta, m.sphi, m.stheta))
        return fit_sarima(window, self.order, start=start)

    def forecast(self, model, history, H):
        return forecast_sarima(model, history, H)

    def in_sample(self, model, window):
        return in_sample_predictions(model, window)


@dataclass(frozen=True)
class RegressionTs(Family):
    p: int = 1
    name = "Regression-TS"

    def fit(self, window, previous=None):
        return fit_regression_ts(window, lags=self.p)

    def forecast(self, model, history, H):
        return forecast_regression_ts(model, history, H)

    def in_sample(self, model, window):
        out = np.full(window.size, np.nan)
        for t in range(self.p, window.size):
            out[t] = forecast_regression_ts(model, window[:t], 1)[0]
        return out


class DirectFamily:
    """Trained once; one call emits all horizons.

    ``stride`` is the number of series positions per original time step
    (2 for the augmented series).
    """

    direct = True
    stride = 1
    name = "direct"

    def prepare(self, y, n_train):
        return y

    def min_origin(self):
        raise NotImplementedError

    def train(self, z_train, H):
        raise NotImplementedError

    def predict(self, model, z_hist, H):
        raise NotImplementedError


@dataclass(frozen=True)
class Mlp(DirectFamily):
    p: int = 22
    hidden: int = 1024
    config: TrainConfig = field(default_factory=TrainConfig)
    name = "NN"

    def min_origin(self):
        return self.p - 1

    def train(self, z_train, H):
        data = sliding_window(z_train, self.p, H * self.stride)
        model, _ = train_mlp(data, (self.p, self.hidden, H * self.stride), self.config)
        return model

    def _raw(self, model, z_hist):
        x = lag_inputs(z_hist, self.p, [z_hist.size - 1])
        return mlp_forward(model, x)[0]

    def predict(self, model, z_hist, H):
        return self._raw(model, z_hist)[:H]


@dataclass(frozen=True)
class AugMlp(Mlp):
    """MLP on the interleaved series; even outputs map to whole-day horizons."""

    base_kt: int = 5
    stride = 2
    name = "AUG-NN"

    def prepare(self, y, n_train):
        # the base SARIMA only sees the training split in-sample and rolls
        # out-of-sample forecasts forward after that
        return augment(y, kt=self.base_kt, fit_end=n_train, split=min(y.size // 2, n_train))

    def min_origin(self):
        return self.p // 2

    def predict(self, model, z_hist, H):
        return self._raw(model, z_hist)[1:2 * H:2]


@dataclass(frozen=True)
class Gru(DirectFamily):
    p: int = 22
    seq_len: int = 7
    hidden: int | None = None
    readout: str = "affine"
    config: TrainConfig = field(default_factory=TrainConfig)
    name = "GRU"

    def min_origin(self):
        return self.seq_len - 2 + self.p

    def train(self, z_train, H):
        model, _ = train_gru(z_train, self.p, H, self.config, self.seq_len, self.hidden,
                             self.readout)
        return model

    def predict(self, model, z_hist, H):
        seq = gru_sequences(z_hist, self.p, self.seq_len, [z_hist.size - 1])
        return gru_predict(model, seq)[0][:H]


FAMILIES = ("rw", "ses", "ar", "arima", "sarima", "regression", "nn", "aug-nn", "gru")


def make_family(name, p=1, seasonal=(3, 1, 1, 7), d=1, q=0, config=None, hidden=1024,
                seq_len=7, aug_p=None):
    """Build a family from its tag; ``p`` is the non-seasonal AR order or lag count."""
    name = name.lower()
    if name == "rw":
        return RandomWalk()
    if name == "ses":
        return Ses()
    if name == "ar":
        return Ar(p)
    if name == "arima":
        return Sarima(ModelOrder(p, d, q))
    if name == "sarima":
        P, D, Q, s = seasonal
        return Sarima(ModelOrder(p, 0, q, P, D, Q, s))
    if name == "regression":
        return RegressionTs(p)
    config = config or TrainConfig()
    if name == "nn":
        return Mlp(p, hidden, config)
    if name == "aug-nn":
        return AugMlp(aug_p or 2 * p, hidden, config)
    if name == "gru":
        return Gru(p, seq_len, None, "affine", config)
    raise ValueError(f"unknown model family {name!r}; choose from {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# rolling validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForecastMatrix:
    """Forecasts by origin (rows) and horizon (columns).

    ``values[i, h-1]`` targets ``actuals[i, h-1] = y[origins[i] + h]`` (NaN
    past the end of the series); ``valid`` marks the cells that are scored.
    """

    model: str
    origins: np.ndarray
    values: np.ndarray
    actuals: np.ndarray
    valid: np.ndarray
    in_sample_pred: np.ndarray
    in_sample_actual: np.ndarray
    windows: np.ndarray            # (origin count, 2): [start, end] of the fit window used
    refit_origins: tuple = ()
    failed_origins: tuple = ()

    @property
    def horizons(self):
        return self.values.shape[1]

    def column(self, h):
        m = self.valid[:, h - 1]
        return self.actuals[m, h - 1], self.values[m, h - 1]

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("origin", "horizon", "forecast", "actual"))
            for i, o in enumerate(self.origins):
                for h in range(1, self.horizons + 1):
                    if self.valid[i, h - 1]:
                        w.writerow((int(o), h, repr(float(self.values[i, h - 1])),
                                    repr(float(self.actuals[i, h - 1]))))
        return path


def _targets(y, origins, H):
    idx = origins[:, None] + np.arange(1, H + 1)[None, :]
    act = np.full(idx.shape, np.nan)
    ok = idx < y.size
    act[ok] = y[idx[ok]]
    return act


def rolling_validate(family, s, cfg=None):
    """Backtest ``family`` over every origin of the test split."""
    cfg = cfg or RollingConfig()
    y = values_of(s)
    n, H = y.size, cfg.horizons
    n_train = cfg.n_train(n)
    if n_train < 2 or n_train > n - 2:
        raise InsufficientDataError(f"series of {n} points leaves no test origins")
    origins = np.arange(n_train - 1, n - 1)
    actuals = _targets(y, origins, H)
    if family.direct:
        return _direct_validate(family, y, n_train, origins, actuals, cfg)

    values = np.full((origins.size, H), np.nan)
    windows = np.empty((origins.size, 2), dtype=int)
    model, first, start, refits, failed = None, None, 0, [], []
    for i, o in enumerate(origins):
        if i % cfg.kt == 0:
            w0 = o - n_train + 1
            try:
                model = family.fit(y[w0:o + 1], model)
                start = w0
                refits.append(int(o))
            except (PfbError, np.linalg.LinAlgError, ValueError):
                if model is None:
                    raise
                failed.append(int(o))
            if i == 0:
                first = model
        windows[i] = (start, start + n_train - 1)
        values[i] = family.forecast(model, y[start:o + 1], H)
    valid = np.isfinite(values) & np.isfinite(actuals)
    # the first window is exactly the training split
    ins = family.in_sample(first, y[:n_train])
    return ForecastMatrix(family.name, origins, values, actuals, valid, ins, y[:n_train].copy(),
                          windows, tuple(refits), tuple(failed))


def _direct_validate(family, y, n_train, origins, actuals, cfg):
    H, k = cfg.horizons, family.stride
    prepared = family.prepare(y, n_train)
    # an augmented series reports base-model refits that fell back to the previous fit
    z = np.asarray(getattr(prepared, "values", prepared), dtype=np.float64)
    model = family.train(z[:k * (n_train - 1) + 1], H)
    values = np.empty((origins.size, H))
    for i, o in enumerate(origins):
        values[i] = family.predict(model, z[:k * o + 1], H)
    valid = np.isfinite(values) & np.isfinite(actuals)
    if not cfg.skip_tail_for_direct:
        valid &= (origins + H <= y.size - 1)[:, None]
    ins = np.full(n_train, np.nan)
    for o in range(family.min_origin(), n_train - 1):
        ins[o + 1] = family.predict(model, z[:k * o + 1], 1)[0]
    windows = np.tile([0, n_train - 1], (origins.size, 1))
    return ForecastMatrix(family.name, origins, values, actuals, valid, ins, y[:n_train].copy(),
                          windows, (int(origins[0]),),
                          tuple(getattr(prepared, "failed_refits", ())))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    model: str
    smape: np.ndarray
    in_sample: float
    orders: tuple | None = None        # selected p per horizon
    in_sample_order: int | None = None
    n_scored: tuple = ()
    flags: tuple = ()

    @property
    def horizons(self):
        return self.smape.size

    @property
    def mean(self):
        return float(np.nanmean(self.smape))

    def to_dict(self):
        return {
            "model": self.model,
            "in_sample": _num(self.in_sample),
            "in_sample_order": self.in_sample_order,
            "smape": [_num(v) for v in self.smape],
            "orders": None if self.orders is None else list(self.orders),
            "n_scored": list(self.n_scored),
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["model"], np.array([np.nan if v is None else v for v in d["smape"]]),
                   np.nan if d["in_sample"] is None else d["in_sample"],
                   None if d.get("orders") is None else tuple(d["orders"]),
                   d.get("in_sample_order"), tuple(d.get("n_scored", ())),
                   tuple(d.get("flags", ())))


def _num(v):
    return None if v is None or not np.isfinite(v) else float(v)


def evaluate(fm):
    H = fm.horizons
    out = np.full(H, np.nan)
    counts = []
    for h in range(1, H + 1):
        a, f = fm.column(h)
        counts.append(int(a.size))
        if a.size:
            out[h - 1] = smape(a, f)
    m = np.isfinite(fm.in_sample_pred)
    ins = smape(fm.in_sample_actual[m], fm.in_sample_pred[m]) if m.any() else np.nan
    flags = tuple(f"fit failed at origin {o}; previous model reused"
                  for o in fm.failed_origins)
    return EvaluationReport(fm.model, out, ins, None, None, tuple(counts), flags)


def _grid_cell(family_name, family_kwargs, y, cfg, p):
    fam = make_family(family_name, p=p, **family_kwargs)
    try:
        return p, evaluate(rolling_validate(fam, y, cfg)), None
    except (PfbError, np.linalg.LinAlgError) as exc:
        return p, None, f"p={p}: {type(exc).__name__}: {exc}"


def order_search(family, s, cfg=None, p_grid=range(1, 23), jobs=1, **family_kwargs):
    """Per-horizon choice of ``p`` by lowest sMAPE; ties go to the smaller ``p``.

    ``family`` is a tag accepted by :func:`make_family`.  Cells that fail are
    skipped and listed in the report flags.  Returns ``(report, per_p)``.
    """
    cfg = cfg or RollingConfig()
    grid = sorted(int(p) for p in p_grid)
    if not grid:
        raise ValueError("p_grid must not be empty")
    y = values_of(s)
    cell = partial(_grid_cell, family, family_kwargs, y, cfg)
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(cell, grid))
    else:
        results = [cell(p) for p in grid]
    per_p = {p: r for p, r, _ in results if r is not None}
    flags = tuple(msg for _, _, msg in results if msg)
    if not per_p:
        raise NumericalError("every cell of the order grid failed: " + "; ".join(flags))
    H = cfg.horizons
    best = np.full(H, np.nan)
    orders = [None] * H
    for p in sorted(per_p):
        for h in range(H):
            v = per_p[p].smape[h]
            if np.isfinite(v) and not v >= best[h]:
                best[h], orders[h] = v, p
    ins_p = min(sorted(per_p), key=lambda p: (np.nan_to_num(per_p[p].in_sample, nan=np.inf), p))
    name = per_p[ins_p].model
    report = EvaluationReport(_grid_name(name), best, per_p[ins_p].in_sample, tuple(orders),
                              ins_p, per_p[grid[0]].n_scored if grid[0] in per_p else (),
                              flags)
    return report, per_p


def _grid_name(name):
    # "SARIMA(3,0,0)x(3,1,1)_7" -> "SARIMA(p,0,0)x(3,1,1)_7"
    if "(" in name:
        head, rest = name.split("(", 1)
        return head + "(p," + rest.split(",", 1)[1]
    return name


@dataclass(frozen=True)
class ImprovementReport:
    per_horizon: np.ndarray
    mean: float
    undefined: tuple

    @property
    def best_horizon(self):
        return int(np.nanargmax(self.per_horizon)) + 1

    def to_dict(self):
        return {"per_horizon": [_num(v) for v in self.per_horizon], "mean": _num(self.mean),
                "undefined": list(self.undefined)}


def improvement_report(base, aug):
    """``100 (base_h - aug_h) / base_h`` per horizon and its mean."""
    b, a = np.asarray(base.smape, float), np.asarray(aug.smape, float)
    if b.size != a.size:
        raise ValueError("reports cover different horizons")
    imp = np.full(b.size, np.nan)
    ok = b != 0
    imp[ok] = 100.0 * (b[ok] - a[ok]) / b[ok]
    undefined = tuple(int(h) + 1 for h in np.flatnonzero(~ok))
    mean = float(np.nanmean(imp)) if np.isfinite(imp).any() else np.nan
    return ImprovementReport(imp, mean, undefined)


def format_table(reports, title=None):
    """Plain-text table: one column per model, rows in-sample and h = 1..H."""
    H = max(r.horizons for r in reports)
    cells = [["Horizon"] + [r.model for r in reports]]

    def cell(v, p):
        if v is None or not np.isfinite(v):
            return "-"
        return f"{v:.2f}" + (f" ({p})" if p is not None else "")

    cells.append(["in-sample"] + [cell(r.in_sample, r.in_sample_order) for r in reports])
    for h in range(1, H + 1):
        row = [str(h)]
        for r in reports:
            v = r.smape[h - 1] if h <= r.horizons else None
            p = r.orders[h - 1] if r.orders is not None and h <= r.horizons else None
            row.append(cell(v, p))
        cells.append(row)
    widths = [max(len(row[j]) for row in cells) for j in range(len(cells[0]))]
    lines = [] if title is None else [title]
    for i, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if j else c.ljust(w)
                               for j, (c, w) in enumerate(zip(row, widths))).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def reports_to_json(reports, extra=None):
    doc = {"reports": [r.to_dict() for r in reports]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
