"""Time each kernel, and one SARIMA grid cell, under both backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints a table of median wall times and the numpy/numba speed ratio.
"""
import argparse
import time

import numpy as np

from pfb import _accel, kernels
from pfb.evaluation import RollingConfig, evaluate, make_family, rolling_validate
from pfb.models import ModelOrder, expand_ar, expand_ma, fit_sarima


def _cases(rng):
    w = rng.normal(size=400)
    a = expand_ar(np.array([0.3]), np.array([0.2, -0.1, 0.05]), 7)
    b = expand_ma(np.zeros(0), np.array([0.4]), 7)
    e = kernels.css_residuals(w, a, b, 0.1)
    y = np.cumsum(rng.normal(size=2000))
    miss = rng.random(2000) < 0.05
    x0 = np.array([1e6 - 10, 0, 10, 0, 0, 0], dtype=float)
    theta = np.array([0.3, 0.2, 0.05, 0.1, 0.1, 0.02])
    series = np.abs(np.cumsum(rng.normal(size=376))) * 10 + 100
    order = ModelOrder(3, 0, 0, 3, 1, 1, 7)
    return {
        "css_residuals (n=400)": lambda: kernels.css_residuals(w, a, b, 0.1),
        "arma_forecast (h=14)": lambda: kernels.arma_forecast(w, e, a, b, 0.1, 14),
        "local_level (n=2000)": lambda: kernels.local_level(y, miss, 0.1),
        "neighbor_stats (n=2000)": lambda: kernels.neighbor_stats(y, 3),
        "epi_simulate (T=1000)": lambda: kernels.epi_simulate(x0, theta, 1e6, 1000),
        "fit_sarima p=3 (n=376)": lambda: fit_sarima(series, order),
        "rolling SARIMA p=3": lambda: evaluate(rolling_validate(
            make_family("sarima", p=3), series, RollingConfig())),
    }


def _time(fn, repeat):
    fn()  # warm-up (JIT compilation, caches)
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return float(np.median(out))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    cases = _cases(np.random.default_rng(0))
    backends = ["numpy"] + (["numba"] if _accel.HAS_NUMBA else [])
    times = {}
    for name in backends:
        with _accel.use_backend(name):
            times[name] = {k: _time(fn, args.repeat) for k, fn in cases.items()}
    width = max(len(k) for k in cases)
    print(f"{'kernel'.ljust(width)}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'ratio':>7}")
    for k in cases:
        t_np = times["numpy"][k] * 1e3
        if "numba" in times:
            t_nb = times["numba"][k] * 1e3
            print(f"{k.ljust(width)}  {t_np:11.3f}  {t_nb:11.3f}  {t_np / t_nb:7.1f}")
        else:
            print(f"{k.ljust(width)}  {t_np:11.3f}  {'-':>11}  {'-':>7}")


if __name__ == "__main__":
    main()
