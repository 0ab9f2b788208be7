"""Command-line entry point: ``pfb <command> [options]``.

Every command accepts ``--config FILE`` (a flat JSON object); explicit flags
override file values, and ``PFB_SEED`` overrides the seed from the file.
Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import os
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .augmentation import augment
from .epi import CompartmentState, EpiParams, calibrate, daily_deaths, simulate, \
    write_trajectory_csv
from .errors import DataError, PfbError, SchemaError, UsageError
from .evaluation import (FAMILIES, EvaluationReport, RollingConfig, evaluate,
                         format_table, improvement_report, make_family, order_search,
                         reports_to_json, rolling_validate)
from .ingest import COUNT_COLUMNS, extract_series, parse_csv, write_csv
from .models import (ModelOrder, fit_ar_yule_walker, fit_regression_ts, fit_sarima,
                     forecast_ar, forecast_regression_ts, forecast_sarima)
from .models.serialize import dumps, loads
from .neural.adam import TrainConfig
from .series import TimeSeries, acf, outlier_mask, pacf, smooth_outliers

DEFAULTS = {
    "input": None,
    "column": "deathIncrease",
    "trim": 0,
    "smooth": True,
    "window": 6,
    "k_sigma": 3.5,
    "q_ratio": 0.1,
    "model": "rw",
    "p": 1,
    "grid": None,
    "d": 1,
    "q": 0,
    "seasonal": "3,1,1,7",
    "order": None,
    "train_fraction": 0.6,
    "kt": 5,
    "horizons": 14,
    "skip_tail": True,
    "epochs": 2000,
    "hidden": 1024,
    "lr": 1e-3,
    "batch_size": 0,
    "aug_p": None,
    "seq_len": 7,
    "seed": 0,
    "jobs": 1,
    "out": "pfb-out",
    "maxlag": 40,
    "model_file": None,
    "horizon": 14,
    "reports": None,
    "alpha": 0.3,
    "qs": "0.2,0.05,0.1,0.1,0.02",
    "population": 1e6,
    "init": None,
    "days": 100,
    "calibrate": False,
}


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def _load_config(path):
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a flat JSON object")
    unknown = sorted(set(doc) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    for k, v in doc.items():
        if isinstance(v, (dict, list)):
            raise UsageError(f"config key {k!r} must be a scalar")
    return doc


def resolve_config(args):
    """Defaults, then the config file, then ``PFB_SEED``, then explicit flags."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    env_seed = os.environ.get("PFB_SEED")
    if env_seed is not None:
        try:
            cfg["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"PFB_SEED must be an integer, got {env_seed!r}") from None
    for k, v in vars(args).items():
        if k in DEFAULTS and v is not None:
            cfg[k] = v
    return cfg


def _echo(cfg, command, out):
    doc = {"command": command, "version": __version__}
    doc.update({k: cfg[k] for k in sorted(cfg)})
    (out / "config.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")


def _outdir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _ints(text, name, count=None):
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated integers, got {text!r}") from None
    if count is not None and len(vals) not in (count if isinstance(count, tuple) else (count,)):
        raise UsageError(f"--{name} expects {count} values, got {len(vals)}")
    return vals


def _floats(text, name, count):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise UsageError(f"--{name} expects {count} values, got {len(vals)}")
    return vals


def parse_grid(text):
    """``"1..22"`` or ``"1,3,5"`` to a list of ints."""
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad grid {text!r}") from None
        if hi < lo:
            raise UsageError(f"empty grid {text!r}")
        return list(range(lo, hi + 1))
    vals = _ints(text, "grid")
    if not vals:
        raise UsageError("empty grid")
    return vals


# ---------------------------------------------------------------------------
# series loading
# ---------------------------------------------------------------------------

def load_series(cfg, smooth=None):
    """Target series from the COVID CSV, or any CSV holding the column."""
    path = cfg["input"]
    if path is None:
        raise UsageError("--input is required")
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    try:
        ds = parse_csv(path)
    except SchemaError:
        s = _generic_series(path, cfg["column"], int(cfg["trim"]))
    else:
        s = extract_series(ds, cfg["column"], int(cfg["trim"]))
    smooth = cfg["smooth"] if smooth is None else smooth
    if smooth:
        s = smooth_outliers(s, int(cfg["window"]), float(cfg["k_sigma"]), float(cfg["q_ratio"]))
    return s


def _generic_series(path, column, trim):
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if column not in header:
            valid = [c for c in header if c != "date"] or list(COUNT_COLUMNS)
            raise SchemaError(f"unknown column {column!r}; valid columns: {', '.join(valid)}")
        rows = list(reader)
    if trim < 0 or trim >= len(rows):
        raise DataError(f"trim must lie in [0, {len(rows)}), got {trim}")
    rows = rows[trim:]
    try:
        vals = np.array([float(r[column]) for r in rows])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value in column {column!r}: {exc}") from None
    start = None
    if "date" in header and rows:
        try:
            start = dt.date.fromisoformat(rows[0]["date"].strip())
        except ValueError:
            start = None
    return TimeSeries(vals, start, column)


def _date(s, i):
    d = s.date_at(i) if s.start_date is not None else None
    return d.isoformat() if d is not None else str(i)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg):
    path = cfg["input"]
    if path is None:
        raise UsageError("--input is required")
    if not Path(path).exists():
        raise DataError(f"input file not found: {path}")
    ds = parse_csv(path)
    s = extract_series(ds, cfg["column"], int(cfg["trim"]))
    out = _outdir(cfg)
    write_csv(ds, out / "canonical.csv")
    _echo(cfg, "ingest", out)
    v = s.values
    print(f"rows: {len(ds)} ({ds.records[0].date.isoformat()} .. {ds.records[-1].date.isoformat()})")
    print(f"series {cfg['column']}: {v.size} points from {s.start_date.isoformat()} "
          f"after trimming {cfg['trim']}")
    print(f"min {v.min():g}  max {v.max():g}  mean {v.mean():.2f}")
    viol = ds.invariant_violations()
    print(f"cumulative-monotonicity warnings: {len(viol)}")
    print(f"canonical CSV: {out / 'canonical.csv'}")
    return 0


def cmd_preprocess(cfg):
    raw = load_series(cfg, smooth=False)
    window, k = int(cfg["window"]), float(cfg["k_sigma"])
    flagged = outlier_mask(raw, window, k)
    sm = smooth_outliers(raw, window, k, float(cfg["q_ratio"])) if cfg["smooth"] else raw
    out = _outdir(cfg)
    with (out / "series.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("date", "value", "smoothed", "outlier"))
        for i in range(len(raw)):
            w.writerow((_date(raw, i), repr(float(raw.values[i])), repr(float(sm.values[i])),
                        int(flagged[i])))
    maxlag = min(int(cfg["maxlag"]), len(sm) // 2 - 1)
    a, pa = acf(sm, maxlag), pacf(sm, maxlag)
    with (out / "acf.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("lag", "acf", "pacf", "band"))
        for i, lag in enumerate(a.lags):
            w.writerow((int(lag), repr(float(a.rho[i])), repr(float(pa.rho[i])),
                        repr(float(a.band))))
    _echo(cfg, "preprocess", out)
    sig = [int(l) for l in pa.significant()]
    print(f"points: {len(raw)}  outliers replaced: {int(flagged.sum())}")
    print(f"significant PACF lags: {', '.join(map(str, sig)) or 'none'}")
    print(f"largest significant PACF lag: {max(sig) if sig else 0}")
    return 0


def _order_from(cfg):
    if cfg["order"]:
        vals = _ints(cfg["order"], "order", (3, 7))
        return ModelOrder(*vals)
    model = cfg["model"]
    if model == "arima":
        return ModelOrder(int(cfg["p"]), int(cfg["d"]), int(cfg["q"]))
    P, D, Q, s = _ints(cfg["seasonal"], "seasonal", 4)
    return ModelOrder(int(cfg["p"]), 0, int(cfg["q"]), P, D, Q, s)


def cmd_fit(cfg):
    s = load_series(cfg)
    model = cfg["model"]
    if model == "ar":
        m = fit_ar_yule_walker(s, int(cfg["p"]))
    elif model in ("arima", "sarima"):
        m = fit_sarima(s, _order_from(cfg))
    elif model == "regression":
        m = fit_regression_ts(s, lags=int(cfg["p"]))
    else:
        raise UsageError(f"fit supports ar, arima, sarima, regression; got {model!r}")
    out = _outdir(cfg)
    (out / "model.json").write_text(dumps(m), encoding="utf-8")
    _echo(cfg, "fit", out)
    summary = {k: v for k, v in json.loads(dumps(m)).items() if k != "coefficients"}
    print(json.dumps(summary, sort_keys=True))
    print(f"model written to {out / 'model.json'}")
    return 0


def cmd_forecast(cfg):
    if not cfg["model_file"]:
        raise UsageError("--model-file is required")
    path = Path(cfg["model_file"])
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    m = loads(path.read_text(encoding="utf-8"))
    s = load_series(cfg)
    h = int(cfg["horizon"])
    if h < 1:
        raise UsageError("--horizon must be >= 1")
    kind = type(m).__name__
    if kind == "SarimaModel":
        f = forecast_sarima(m, s, h)
    elif kind == "ArModel":
        f = forecast_ar(m, s, h)
    elif kind == "RegressionTsModel":
        f = forecast_regression_ts(m, s, h)
    else:
        raise UsageError(f"forecasting from a {kind} file is not supported here")
    out = _outdir(cfg)
    n = len(s)
    with (out / "forecast.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("step", "date", "forecast"))
        for i, v in enumerate(f, start=1):
            w.writerow((i, _date(s, n - 1 + i), repr(float(v))))
    _echo(cfg, "forecast", out)
    print(" ".join(f"{v:.2f}" for v in f))
    return 0


def _rolling_cfg(cfg):
    return RollingConfig(float(cfg["train_fraction"]), int(cfg["kt"]), int(cfg["horizons"]),
                         bool(cfg["skip_tail"]))


def _train_cfg(cfg):
    return TrainConfig(lr=float(cfg["lr"]), epochs=int(cfg["epochs"]),
                       batch_size=int(cfg["batch_size"]) or None, seed=int(cfg["seed"]))


def cmd_evaluate(cfg):
    s = load_series(cfg)
    rc = _rolling_cfg(cfg)
    names = [m.strip().lower() for m in str(cfg["model"]).split(",") if m.strip()]
    for name in names:
        if name not in FAMILIES:
            raise UsageError(f"unknown model {name!r}; choose from {', '.join(FAMILIES)}")
    P, D, Q, per = _ints(cfg["seasonal"], "seasonal", 4)
    kw = {"seasonal": (P, D, Q, per), "d": int(cfg["d"]), "q": int(cfg["q"]),
          "config": _train_cfg(cfg), "hidden": int(cfg["hidden"]),
          "seq_len": int(cfg["seq_len"]), "aug_p": cfg["aug_p"] and int(cfg["aug_p"])}
    grid = parse_grid(cfg["grid"]) if cfg["grid"] else None
    reports, matrices = [], []
    for name in names:
        if grid is not None and name not in ("rw", "ses"):
            rep, _ = order_search(name, s, rc, grid, jobs=int(cfg["jobs"]), **kw)
            p_plot = rep.orders[0] if rep.orders and rep.orders[0] is not None else grid[0]
            fm = rolling_validate(make_family(name, p=p_plot, **kw), s, rc)
        else:
            fm = rolling_validate(make_family(name, p=int(cfg["p"]), **kw), s, rc)
            rep = evaluate(fm)
        reports.append(rep)
        matrices.append(fm)

    out = _outdir(cfg)
    extra = {"series": {"column": cfg["column"], "points": len(s),
                        "train_points": rc.n_train(len(s))}}
    tables = [format_table(reports, "sMAPE by horizon")]
    if "nn" in names and "aug-nn" in names:
        imp = improvement_report(reports[names.index("nn")], reports[names.index("aug-nn")])
        extra["improvement"] = imp.to_dict()
        lines = ["Improvement due to augmentation (%)"]
        lines += [f"{h:>3}  {v:7.2f}" if np.isfinite(v) else f"{h:>3}        -"
                  for h, v in enumerate(imp.per_horizon, start=1)]
        lines.append(f"mean {imp.mean:7.2f}")
        tables.append("\n".join(lines) + "\n")
    (out / "report.json").write_text(reports_to_json(reports, extra), encoding="utf-8")
    (out / "table.txt").write_text("\n".join(tables), encoding="utf-8")
    _write_forecasts(out / "forecasts.csv", matrices)
    _write_plotdata(out / "plotdata.csv", s, matrices)
    _echo(cfg, "evaluate", out)
    sys.stdout.write("\n".join(tables))
    return 0


def _write_forecasts(path, matrices):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("model", "origin", "horizon", "forecast", "actual"))
        for fm in matrices:
            for i, o in enumerate(fm.origins):
                for h in range(1, fm.horizons + 1):
                    if fm.valid[i, h - 1]:
                        w.writerow((fm.model, int(o), h, repr(float(fm.values[i, h - 1])),
                                    repr(float(fm.actuals[i, h - 1]))))


def _write_plotdata(path, s, matrices):
    """date, actual and the h=1 forecast of each model for every test target."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "actual"] + [fm.model for fm in matrices])
        origins = matrices[0].origins
        for i, o in enumerate(origins):
            t = int(o) + 1
            if t >= len(s):
                break
            w.writerow([_date(s, t), repr(float(s.values[t]))]
                       + [repr(float(fm.values[i, 0])) for fm in matrices])


def cmd_augment(cfg):
    s = load_series(cfg)
    aug = augment(s, kt=int(cfg["kt"]))
    out = _outdir(cfg)
    aug.write_csv(out / "augmented.csv")
    _echo(cfg, "augment", out)
    print(f"original points: {len(s)}  augmented points: {len(aug)} (2n-1 = {2 * len(s) - 1})")
    print(f"base model: {aug.base_model}")
    if aug.failed_refits:
        print("base refits that kept the previous model at origins: "
              + ", ".join(str(o) for o in aug.failed_refits))
    print(f"augmented CSV: {out / 'augmented.csv'}")
    return 0


def cmd_simulate_epi(cfg):
    N = float(cfg["population"])
    q = _floats(cfg["qs"], "q", 5)
    try:
        params = EpiParams(float(cfg["alpha"]), *q, N=N)
        if cfg["init"]:
            init = CompartmentState(*_floats(cfg["init"], "init", 6))
        else:
            init = CompartmentState(N - 10.0, 0.0, 10.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    T = int(cfg["days"])
    traj = simulate(init, params, T)
    out = _outdir(cfg)
    write_trajectory_csv(traj, out / "trajectory.csv", total=True)
    totals = traj.states.sum(axis=1)
    summary = {"days": T, "population": N, "clamped_steps": traj.clamped_steps,
               "max_total_drift": float(np.max(np.abs(totals - totals[0]))),
               "final": dict(zip(("S", "E", "I", "IH", "R", "D"),
                                 (float(v) for v in traj.states[-1])))}
    if cfg["calibrate"]:
        deaths = daily_deaths(traj)
        cal = calibrate(deaths, init, N)
        y = deaths.values
        threshold = 1e-6 * float(np.dot(y, y))
        summary["calibration"] = {
            "params": dict(zip(("alpha", "q1", "q2", "q3", "q4", "q5"),
                               (float(v) for v in cal.params.vector()))),
            "sse": cal.sse, "threshold": threshold, "below_threshold": cal.sse < threshold,
            "flat_directions": list(cal.flat_directions), "converged": cal.converged,
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
    _echo(cfg, "simulate-epi", out)
    print(f"days: {T}  population drift: {summary['max_total_drift']:.3g}  "
          f"clamped steps: {traj.clamped_steps}")
    if "calibration" in summary:
        c = summary["calibration"]
        print(f"calibration SSE {c['sse']:.3g} (threshold {c['threshold']:.3g}): "
              f"{'ok' if c['below_threshold'] else 'above threshold'}")
    return 0


def cmd_report(cfg):
    paths = cfg["reports"]
    if not paths:
        raise UsageError("--reports needs at least one report.json")
    reports = []
    for p in paths if isinstance(paths, list) else str(paths).split(","):
        path = Path(p)
        if not path.exists():
            raise DataError(f"report file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            reports += [EvaluationReport.from_dict(d) for d in doc["reports"]]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataError(f"{path}: not a report file ({exc})") from None
    text = format_table(reports, "sMAPE by horizon")
    names = [r.model for r in reports]
    if "NN" in names and "AUG-NN" in names:
        imp = improvement_report(reports[names.index("NN")], reports[names.index("AUG-NN")])
        text += f"\nmean improvement due to augmentation: {imp.mean:.2f}% " \
                f"(max {np.nanmax(imp.per_horizon):.2f}% at h={imp.best_horizon})\n"
    out = _outdir(cfg)
    (out / "table.txt").write_text(text, encoding="utf-8")
    _echo(cfg, "report", out)
    sys.stdout.write(text)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "augment": cmd_augment,
    "simulate-epi": cmd_simulate_epi,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _bool_flag(p, name, help_):
    dest = name.replace("-", "_")
    p.add_argument(f"--{name}", dest=dest, action="store_true", default=None, help=help_)
    p.add_argument(f"--no-{name}", dest=dest, action="store_false", default=None,
                   help=argparse.SUPPRESS)


def build_parser():
    parser = _Parser(prog="pfb", description="Forecasting toolkit and backtest harness.")
    parser.add_argument("--version", action="version", version=f"pfb {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, series=True):
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        if series:
            p.add_argument("--input", help="input CSV")
            p.add_argument("--column", help="series column")
            p.add_argument("--trim", type=int, help="leading rows to drop")
            _bool_flag(p, "smooth", "replace outliers by the local-level smoother")
            p.add_argument("--window", type=int)
            p.add_argument("--k-sigma", dest="k_sigma", type=float)
            p.add_argument("--q-ratio", dest="q_ratio", type=float)

    p = sub.add_parser("ingest", help="validate the CSV and summarise a column")
    common(p)
    p = sub.add_parser("preprocess", help="outlier smoothing and ACF/PACF")
    common(p)
    p.add_argument("--maxlag", type=int)
    for name in ("fit", "evaluate"):
        p = sub.add_parser(name, help="fit one model" if name == "fit" else "rolling backtest")
        common(p)
        p.add_argument("--model", help="model family (evaluate accepts a comma list)")
        p.add_argument("--p", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--seasonal", help="P,D,Q,s")
        if name == "fit":
            p.add_argument("--order", help="p,d,q or p,d,q,P,D,Q,s")
            continue
        p.add_argument("--grid", help="p grid, e.g. 1..22")
        p.add_argument("--train-fraction", dest="train_fraction", type=float)
        p.add_argument("--kt", type=int)
        p.add_argument("--horizons", type=int)
        _bool_flag(p, "skip-tail", "score direct models per horizon (drop last h-1 origins)")
        p.add_argument("--epochs", type=int)
        p.add_argument("--hidden", type=int)
        p.add_argument("--lr", type=float)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--aug-p", dest="aug_p", type=int)
        p.add_argument("--seq-len", dest="seq_len", type=int)
        p.add_argument("--jobs", type=int, help="worker processes for the order grid")
    p = sub.add_parser("forecast", help="forecast from a saved model")
    common(p)
    p.add_argument("--model-file", dest="model_file")
    p.add_argument("--horizon", type=int)
    p = sub.add_parser("augment", help="write the interleaved series")
    common(p)
    p.add_argument("--kt", type=int)
    p = sub.add_parser("simulate-epi", help="run (and optionally calibrate) SEI2RD")
    common(p, series=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--q", dest="qs", help="q1,q2,q3,q4,q5")
    p.add_argument("--N", dest="population", type=float)
    p.add_argument("--init", help="S,E,I,IH,R,D")
    p.add_argument("--days", type=int)
    _bool_flag(p, "calibrate", "fit the parameters back to the simulated deaths")
    p = sub.add_parser("report", help="render tables from report.json files")
    common(p, series=False)
    p.add_argument("--reports", nargs="+")
    return parser


def _origin_module(exc):
    tb = exc.__traceback__
    name = "pfb"
    for frame, _ in traceback.walk_tb(tb):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("pfb"):
            name = mod
    return name


def main(argv=None):
    parser = build_parser()
    command = "pfb"
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 2
        command = args.command
        cfg = resolve_config(args)
        t0 = time.perf_counter()
        code = COMMANDS[command](cfg)
        print(f"done in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
        return code
    except PfbError as exc:
        print(f"pfb {command}: {_origin_module(exc)}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return exc.exit_code if exc.exit_code in (2, 3, 4) else 4
    except (ValueError, TypeError) as exc:
        print(f"pfb {command}: {_origin_module(exc)}: invalid argument: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"pfb {command}: {_origin_module(exc)}: numerical error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"pfb {command}: cannot access {exc.filename or ''}: {exc.strerror or exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
