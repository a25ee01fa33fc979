import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from sirsfold.acceptance import shipped_params
from sirsfold.equilibria import catalog
from sirsfold.model import Regime, ScaledSat, ScaledSub, nondimensionalize, rhs_sub
from sirsfold.simulate import IntegrationError, SwitchingError, integrate


@pytest.fixture(scope="module")
def endemic():
    return nondimensionalize(shipped_params("endemic"))


def test_stationary_at_stable_endemic_point(endemic):
    sub, sat = endemic
    (eq,) = [e for e in catalog(sub, sat).endemic if e.admissible]
    traj = integrate((eq.x, eq.y), sub, sat, t_end=100)
    assert np.max(np.abs(traj.states - [eq.x, eq.y])) < 1e-6


def test_cond1_parameters_reach_origin():
    sub, sat = nondimensionalize(shipped_params("cond1"))
    traj = integrate((0.5, 0.5), sub, sat, t_end=500)
    assert np.hypot(*traj.final) < 1e-4


def test_single_downward_crossing(endemic):
    sub, sat = endemic
    traj = integrate((2.0, 0.5), sub, sat, t_end=30)
    assert len(traj.events) == 1
    ev = traj.events[0]
    assert ev.direction == -1
    assert ev.state[0] == pytest.approx(sub.x0, abs=1e-9)
    assert traj.regime_flags[0] is Regime.SAT and traj.regime_flags[-1] is Regime.SUB


def test_halving_tolerance(endemic):
    sub, sat = endemic
    tol = 1e-8
    a = integrate((2.0, 0.5), sub, sat, t_end=10, tol=tol).final
    b = integrate((2.0, 0.5), sub, sat, t_end=10, tol=tol / 2).final
    assert np.max(np.abs(a - b)) < 10 * tol


def test_reverse_time_returns_to_start(endemic):
    sub, sat = endemic
    start = (2.0, 0.5)
    fwd = integrate(start, sub, sat, t_end=3, tol=1e-11)
    back = integrate(fwd.final, sub, sat, t_end=3, tol=1e-11, backward=True)
    assert np.max(np.abs(back.final - start)) < 1e-5
    assert back.events and back.events[0].direction == +1


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0, 3), y=st.floats(0, 3))
def test_first_quadrant_is_invariant(endemic, x, y):
    sub, sat = endemic
    try:
        traj = integrate((x, y), sub, sat, t_end=20, tol=1e-8)
    except SwitchingError:
        return
    assert traj.states.min() >= -1e-9


def test_sliding_on_switching_line_is_an_error():
    sub = ScaledSub(m=0, B=3, e=1, q=0.5, x0=1)
    sat = ScaledSat(m=0, B=3, g=0.5, p=0.25, f=2, x0=1)
    with pytest.raises(SwitchingError) as info:
        integrate((0.5, 0.0), sub, sat, t_end=20)
    assert info.value.time > 0


def test_matches_scipy_on_smooth_field():
    sub = ScaledSub(m=0.8, B=3, e=1.2, q=0.6)
    traj = integrate((0.2, 0.1), sub, None, t_end=15, tol=1e-10)
    ref = solve_ivp(lambda _, s: rhs_sub(s[0], s[1], sub), (0, 15), (0.2, 0.1), rtol=1e-12, atol=1e-13)
    assert np.allclose(traj.final, ref.y[:, -1], atol=1e-7)
    t_mid = 7.3
    dense_ref = solve_ivp(lambda _, s: rhs_sub(s[0], s[1], sub), (0, t_mid), (0.2, 0.1), rtol=1e-12, atol=1e-13)
    assert np.allclose(traj.dense(t_mid), dense_ref.y[:, -1], atol=1e-6)


@pytest.mark.parametrize("kwargs", [dict(tol=1.0), dict(tol=1e-14), dict(t_end=0), dict(t_end=-1)])
def test_argument_validation(endemic, kwargs):
    sub, sat = endemic
    with pytest.raises(ValueError):
        integrate((1, 1), sub, sat, **kwargs)


def test_negative_start_rejected(endemic):
    sub, sat = endemic
    with pytest.raises(ValueError, match="quadrant"):
        integrate((-0.1, 1), sub, sat)


def test_step_budget_exhaustion_raises(endemic):
    sub, sat = endemic
    with pytest.raises(IntegrationError):
        integrate((2.0, 0.5), sub, sat, t_end=100, max_steps=5)
