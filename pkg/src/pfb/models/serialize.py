"""JSON documents for fitted statistical models.

Layout: ``{"type", "order", "coefficients", "intercept" | "mean", "sigma2"}``
plus type-specific extras.  Floats go through ``repr`` so a dump/load round
trip is exact.
"""
import json

import numpy as np

from .ar import ArModel
from .regression import RegressionTsModel, VarModel
from .sarima import ModelOrder, SarimaModel


def _arr(a):
    return [float(v) for v in np.asarray(a).reshape(-1)]


def model_to_dict(m):
    if isinstance(m, SarimaModel):
        return {
            "type": "sarima",
            "order": dict(zip("p d q P D Q s".split(), m.order.as_tuple())),
            "coefficients": {"phi": _arr(m.phi), "theta": _arr(m.theta),
                             "sphi": _arr(m.sphi), "stheta": _arr(m.stheta)},
            "intercept": float(m.intercept),
            "sigma2": float(m.sigma2),
            "sse": float(m.sse),
            "n_obs": int(m.n_obs),
            "aic": float(m.aic),
            "stationary": bool(m.stationary),
            "converged": bool(m.converged),
        }
    if isinstance(m, ArModel):
        return {"type": "ar", "order": {"p": m.p}, "coefficients": {"phi": _arr(m.phi)},
                "mean": float(m.mean), "sigma2": float(m.sigma2),
                "stationary": bool(m.stationary)}
    if isinstance(m, VarModel):
        return {"type": "var", "order": {"p": m.p, "n": m.n},
                "coefficients": {"Phi": np.asarray(m.Phi).tolist()},
                "intercept": _arr(m.delta), "sigma2": np.asarray(m.sigma).tolist()}
    if isinstance(m, RegressionTsModel):
        return {"type": "regression_ts",
                "order": {"lags": m.lags, "x_lags": list(m.x_lags),
                          "time_terms": int(m.time_coefs.size)},
                "coefficients": {"phi": _arr(m.phi), "b": _arr(m.b),
                                 "time": _arr(m.time_coefs)},
                "intercept": float(m.intercept), "sigma2": float(m.sigma2),
                "columns": list(m.columns)}
    raise TypeError(f"cannot serialise {type(m).__name__}")


def model_from_dict(doc):
    kind = doc["type"]
    c = doc["coefficients"]
    if kind == "sarima":
        return SarimaModel(ModelOrder(**doc["order"]), doc["intercept"], np.array(c["phi"]),
                           np.array(c["theta"]), np.array(c["sphi"]), np.array(c["stheta"]),
                           doc["sigma2"], doc.get("sse", 0.0), doc.get("n_obs", 0),
                           doc.get("aic", float("nan")), doc.get("stationary", True),
                           doc.get("converged", True))
    if kind == "ar":
        return ArModel(doc["order"]["p"], doc["mean"], np.array(c["phi"]), doc["sigma2"],
                       doc.get("stationary", True))
    if kind == "var":
        o = doc["order"]
        return VarModel(o["n"], o["p"], np.array(doc["intercept"]), np.array(c["Phi"]),
                        np.array(doc["sigma2"]))
    if kind == "regression_ts":
        o = doc["order"]
        return RegressionTsModel(doc["intercept"], np.array(c["phi"]), np.array(c["b"]),
                                 tuple(o["x_lags"]), np.array(c["time"]), doc["sigma2"],
                                 tuple(doc["columns"]))
    raise ValueError(f"unknown model type {kind!r}")


def dumps(m):
    return json.dumps(model_to_dict(m), indent=2, sort_keys=True)


def loads(text):
    return model_from_dict(json.loads(text))
