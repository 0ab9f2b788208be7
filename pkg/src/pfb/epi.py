"""SEI2RD compartmental difference equations and least-squares calibration.

One step moves

    new infections  alpha * (I + IH) / N * S   S -> E
    onset           q1 * E                     E -> I
    hospitalisation q2 * I                     I -> IH
    recovery        q3 * I,  q4 * IH           I, IH -> R
    death           q5 * IH                    IH -> D

The susceptible update has no inflow, so the six compartments always sum
to N.  (A re-entry term ``+ q5 * IH`` in S would add the dead back to the
susceptible pool and break conservation; it is deliberately absent.)
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize

from . import kernels
from .errors import InsufficientDataError
from .series import TimeSeries

PARAM_NAMES = ("alpha", "q1", "q2", "q3", "q4", "q5")
COMPARTMENTS = ("S", "E", "I", "IH", "R", "D")


@dataclass(frozen=True)
class EpiParams:
    alpha: float
    q1: float
    q2: float
    q3: float
    q4: float
    q5: float
    N: float

    def __post_init__(self):
        if self.N <= 0:
            raise ValueError("population N must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        for name in PARAM_NAMES[1:]:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.q2 + self.q3 > 1.0 + 1e-12:
            raise ValueError("q2 + q3 must not exceed 1")
        if self.q4 + self.q5 > 1.0 + 1e-12:
            raise ValueError("q4 + q5 must not exceed 1")

    def vector(self):
        return np.array([getattr(self, n) for n in PARAM_NAMES])

    @classmethod
    def from_vector(cls, v, N):
        return cls(*(float(x) for x in v), N=float(N))


@dataclass(frozen=True)
class CompartmentState:
    S: float
    E: float = 0.0
    I: float = 0.0
    IH: float = 0.0
    R: float = 0.0
    D: float = 0.0

    def __post_init__(self):
        for name in COMPARTMENTS:
            if getattr(self, name) < 0:
                raise ValueError(f"compartment {name} is negative")

    def vector(self):
        return np.array([getattr(self, n) for n in COMPARTMENTS])

    @property
    def total(self):
        return float(self.vector().sum())

    @classmethod
    def from_vector(cls, v):
        return cls(*(float(x) for x in v))


@dataclass(frozen=True)
class Trajectory:
    """Simulated states, one row per day, columns S, E, I, IH, R, D."""

    states: np.ndarray
    N: float
    clamped_steps: int = 0

    def __len__(self):
        return self.states.shape[0]

    def __getitem__(self, t):
        return CompartmentState.from_vector(self.states[t])

    def column(self, name):
        return self.states[:, COMPARTMENTS.index(name)]

    @property
    def clamped(self):
        return self.clamped_steps > 0


def step(state, params):
    """One day of the SEI2RD update; see the module docstring."""
    traj = simulate(state, params, 1)
    return traj[1]


def simulate(init, params, T):
    if T < 0:
        raise ValueError("T must be >= 0")
    if params.N == 0:
        raise ValueError("population N must be non-zero")
    states, clamped = kernels.epi_simulate(init.vector(), params.vector(), params.N, T)
    return Trajectory(states, params.N, int(clamped))


def daily_deaths(trajectory):
    d = trajectory.column("D") if isinstance(trajectory, Trajectory) else \
        np.array([s.D for s in trajectory])
    if d.size < 2:
        raise InsufficientDataError("need at least two states")
    return TimeSeries(np.maximum(np.diff(d), 0.0), name="deathIncrease")


def write_trajectory_csv(trajectory, path, total=False):
    """Columns t, S, E, I, IH, R, D (plus their sum when ``total`` is set)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t",) + COMPARTMENTS + (("total",) if total else ()))
        for t, row in enumerate(trajectory.states):
            extra = [repr(float(row.sum()))] if total else []
            w.writerow([t] + [repr(float(v)) for v in row] + extra)
    return path


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------

DEFAULT_BOUNDS = {
    "alpha": (0.0, 1.0),
    "q1": (0.0, 1.0),
    "q2": (0.0, 1.0),
    "q3": (0.0, 1.0),
    "q4": (0.0, 1.0),
    "q5": (0.0, 1.0),
}


@dataclass(frozen=True)
class Calibration:
    params: EpiParams
    sse: float
    converged: bool
    flat_directions: tuple
    n_evaluations: int


def _project(v, lo, hi):
    v = np.clip(v, lo, hi)
    # keep the outflow fractions of I and IH admissible
    for a, b in ((2, 3), (4, 5)):
        s = v[a] + v[b]
        if s > 1.0:
            v[a] /= s
            v[b] /= s
    return v


def _sim_deaths(v, x0, n_pop, T):
    states, _ = kernels.epi_simulate(x0, v, n_pop, T)
    return np.diff(states[:, 5])


def calibrate(observed_deaths, init, N=None, bounds=None, start=None, max_iter=4000,
              restarts=3, polish=True):
    """Fit (alpha, q1..q5) to a daily death series by least squares.

    Nelder-Mead runs on the box-projected parameters from a fixed start
    simplex, restarting from its own optimum; an optional bounded
    trust-region pass polishes the result.  Deterministic for fixed inputs.
    """
    y = np.asarray(observed_deaths.values if isinstance(observed_deaths, TimeSeries)
                   else observed_deaths, dtype=np.float64)
    if y.size < 14:
        raise InsufficientDataError("calibration needs at least 14 observations")
    N = float(init.total if N is None else N)
    b = dict(DEFAULT_BOUNDS)
    if bounds:
        b.update(bounds)
    lo = np.array([b[n][0] for n in PARAM_NAMES], dtype=np.float64)
    hi = np.array([b[n][1] for n in PARAM_NAMES], dtype=np.float64)
    x0 = init.vector()
    T = y.size
    nfev = 0

    def sse(v):
        nonlocal nfev
        nfev += 1
        r = _sim_deaths(_project(v, lo, hi), x0, N, T) - y
        return float(np.dot(r, r))

    v = np.asarray(start, dtype=np.float64) if start is not None else (lo + hi) / 2.0
    v = _project(v.copy(), lo, hi)
    converged = False
    for _ in range(max(1, restarts)):
        res = optimize.minimize(sse, v, method="Nelder-Mead",
                                options={"maxiter": max_iter, "xatol": 1e-12,
                                         "fatol": 1e-14, "adaptive": True})
        v = _project(res.x, lo, hi)
        converged = bool(res.success)
    if polish:
        def resid(u):
            nonlocal nfev
            nfev += 1
            return _sim_deaths(_project(u, lo, hi), x0, N, T) - y
        ls = optimize.least_squares(resid, np.clip(v, lo, hi), bounds=(lo, hi), method="trf",
                                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        cand = _project(ls.x, lo, hi)
        if sse(cand) <= sse(v):
            v = cand
            converged = converged or ls.status > 0
    best = sse(v)
    flat = _flat_directions(sse, v, lo, hi, best)
    return Calibration(EpiParams.from_vector(v, N), best, converged, flat, nfev)


def _flat_directions(f, v, lo, hi, base, rel=1e-6):
    """Parameters whose perturbation leaves the objective unchanged."""
    flat = []
    scale = max(abs(base), 1e-300)
    for i, name in enumerate(PARAM_NAMES):
        span = hi[i] - lo[i]
        u = v.copy()
        u[i] = v[i] + 0.1 * span if v[i] + 0.1 * span <= hi[i] else v[i] - 0.1 * span
        if abs(f(u) - base) <= rel * scale or (base == 0.0 and f(u) == 0.0):
            flat.append(name)
    return tuple(flat)
