"""Versioned JSON checkpoints of trained forecasters."""
import json
from pathlib import Path

import numpy as np

from .gru import GruForecaster
from .mlp import MlpForecaster, Scaler

FORMAT_VERSION = 1


def _scaler_doc(s):
    return {"mean": np.asarray(s.mean).tolist(), "scale": np.asarray(s.scale).tolist()}


def _scaler_from(doc):
    mean, scale = np.asarray(doc["mean"]), np.asarray(doc["scale"])
    return Scaler(mean if mean.ndim else float(mean), scale if scale.ndim else float(scale))


def to_dict(model):
    doc = {"format_version": FORMAT_VERSION,
           "params": {k: np.asarray(v).tolist() for k, v in model.params.items()},
           "x_scaler": _scaler_doc(model.x_scaler),
           "y_scaler": _scaler_doc(model.y_scaler)}
    if isinstance(model, MlpForecaster):
        doc["kind"] = "mlp"
    elif isinstance(model, GruForecaster):
        doc.update(kind="gru", p=model.p, k=model.k, seq_len=model.seq_len,
                   readout=model.readout)
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")
    return doc


def from_dict(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('format_version')}")
    params = {k: np.asarray(v, dtype=np.float64) for k, v in doc["params"].items()}
    xs, ys = _scaler_from(doc["x_scaler"]), _scaler_from(doc["y_scaler"])
    if doc["kind"] == "mlp":
        return MlpForecaster(params, xs, ys)
    if doc["kind"] == "gru":
        return GruForecaster(params, doc["p"], doc["k"], doc["seq_len"], doc["readout"], xs, ys)
    raise ValueError(f"unknown model kind {doc['kind']!r}")


def save(model, path):
    Path(path).write_text(json.dumps(to_dict(model)), encoding="utf-8")


def load(path):
    return from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
