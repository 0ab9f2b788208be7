import numpy as np
import pytest
from hypothesis import given, strategies as st

from pfb.epi import (CompartmentState, EpiParams, calibrate, daily_deaths, simulate, step,
                     write_trajectory_csv)


def random_draw(rng):
    q1 = rng.uniform(0, 1)
    q2, q3 = rng.dirichlet([1, 1, 1])[:2]
    q4, q5 = rng.dirichlet([1, 1, 1])[:2]
    alpha = rng.uniform(0, 3)
    x = rng.uniform(0, 1e5, 6) * (rng.random(6) < 0.8)
    x[0] += 1.0
    return EpiParams(alpha, q1, q2, q3, q4, q5, float(x.sum())), CompartmentState.from_vector(x)


def hand_step(x, p):
    S, E, I, IH, R, D = x
    new = p.alpha * (I + IH) / p.N * S
    return np.array([S - new, E + new - p.q1 * E, I + p.q1 * E - (p.q2 + p.q3) * I,
                     IH + p.q2 * I - (p.q4 + p.q5) * IH, R + p.q3 * I + p.q4 * IH,
                     D + p.q5 * IH])


def test_single_step_matches_equations():
    p = EpiParams(0.3, 0.2, 0.1, 0.05, 0.1, 0.02, 1000.0)
    x = CompartmentState(900, 50, 30, 10, 5, 5)
    assert np.allclose(step(x, p).vector(), hand_step(x.vector(), p), rtol=1e-14)


def test_hand_values():
    p = EpiParams(0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 100.0)
    got = step(CompartmentState(80, 0, 20), p).vector()
    assert np.allclose(got, [72, 8, 0, 10, 10, 0])


def test_disease_free_fixed_point():
    p = EpiParams(0.9, 0.3, 0.2, 0.3, 0.4, 0.1, 500.0)
    traj = simulate(CompartmentState(400, 0, 0, 0, 60, 40), p, 50)
    assert np.all(traj.states == traj.states[0])


def test_no_transmission_keeps_susceptibles():
    p = EpiParams(0.0, 0.3, 0.2, 0.3, 0.4, 0.1, 1000.0)
    traj = simulate(CompartmentState(700, 100, 100, 100), p, 30)
    assert np.all(traj.column("S") == 700)


def test_everyone_dies_eventually():
    p = EpiParams(0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 10.0)
    traj = simulate(CompartmentState(0, 10), p, 3)
    assert traj[3].D == pytest.approx(10)


@given(st.integers(0, 2**32 - 1))
def test_conservation_and_monotonicity(seed):
    rng = np.random.default_rng(seed)
    p, x = random_draw(rng)
    traj = simulate(x, p, 200)
    s = traj.states
    assert np.all(np.abs(s.sum(axis=1) - p.N) <= 1e-9 * p.N)
    assert np.all(np.diff(traj.column("D")) >= 0)
    assert np.all(np.diff(traj.column("R")) >= 0)
    assert np.all(s >= -1e-9 * p.N)


def test_parameter_validation():
    with pytest.raises(ValueError):
        EpiParams(0.1, 0.1, 0.7, 0.5, 0.1, 0.1, 100)
    with pytest.raises(ValueError):
        EpiParams(-0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 100)
    with pytest.raises(ValueError):
        EpiParams(0.1, 1.2, 0.1, 0.1, 0.1, 0.1, 100)
    with pytest.raises(ValueError):
        CompartmentState(-1.0)
    with pytest.raises(ValueError):
        simulate(CompartmentState(10), EpiParams(0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 10), -1)


def test_daily_deaths():
    p = EpiParams(0.4, 0.3, 0.2, 0.3, 0.4, 0.1, 1e4)
    traj = simulate(CompartmentState(9900, 50, 50), p, 30)
    dd = daily_deaths(traj)
    assert dd.values.size == 30
    assert np.allclose(np.cumsum(dd.values), traj.column("D")[1:] - traj.column("D")[0])


def test_calibration_round_trip():
    truth = EpiParams(0.35, 0.25, 0.08, 0.15, 0.2, 0.05, 1e6)
    init = CompartmentState(1e6 - 200, 100, 100)
    y = daily_deaths(simulate(init, truth, 120)).values
    cal = calibrate(y, init)
    assert cal.sse < 1e-6 * np.sum(y ** 2)


def test_calibration_flat_directions_on_zeros():
    init = CompartmentState(1000)
    cal = calibrate(np.zeros(30), init)
    assert cal.sse == 0.0
    assert set(cal.flat_directions) == {"alpha", "q1", "q2", "q3", "q4", "q5"}


def test_calibration_deterministic():
    truth = EpiParams(0.5, 0.3, 0.1, 0.2, 0.2, 0.1, 5e4)
    init = CompartmentState(5e4 - 50, 0, 50)
    y = daily_deaths(simulate(init, truth, 60)).values
    a, b = calibrate(y, init, restarts=1), calibrate(y, init, restarts=1)
    assert np.array_equal(a.params.vector(), b.params.vector())


def test_trajectory_csv(tmp_path):
    p = EpiParams(0.4, 0.3, 0.2, 0.3, 0.4, 0.1, 1e3)
    traj = simulate(CompartmentState(990, 0, 10), p, 5)
    path = write_trajectory_csv(traj, tmp_path / "t.csv", total=True)
    rows = path.read_text().splitlines()
    assert rows[0] == "t,S,E,I,IH,R,D,total"
    assert len(rows) == 7
    assert float(rows[-1].split(",")[-1]) == pytest.approx(1e3)
