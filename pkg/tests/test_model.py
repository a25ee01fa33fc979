import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from sirsfold.model import (
    ParameterError,
    RawParams,
    Regime,
    ScaledSat,
    ScaledSub,
    finite_difference_jacobian,
    jacobian,
    load_params,
    nondimensionalize,
    rhs,
    rhs_full,
    rhs_limiting,
    scaled_time_factor,
    to_raw_state,
    to_scaled_state,
)

BASE = dict(A=2.0, d=1.0, lam=2.0, nu=1.0, mu=0.5, theta=1.0, r=0.5, n=1.0, I0=1.0)


def test_nondimensionalize_reference_set():
    sub, sat = nondimensionalize(RawParams(**BASE))
    # (d+mu+r)/k = 2/2, not 1.5
    assert (sub.m, sub.B, sub.e, sub.q, sub.x0) == pytest.approx((1, 2, 1, 0.5, 1))
    assert (sat.g, sat.p, sat.f) == pytest.approx((0.75, 0.25, 0.5))


def test_bilinear_and_untreated_limits():
    sub, _ = nondimensionalize(RawParams(**{**BASE, "nu": 0.0}))
    assert sub.m == 0
    sub, sat = nondimensionalize(RawParams(**{**BASE, "r": 0.0, "n": 0.0}))
    assert sub.e == sat.g and sub.q == sat.p and sat.f == 0


def test_rhs_examples():
    sub = ScaledSub(m=1, B=2, e=1, q=1)
    assert rhs((0, 0), sub).tolist() == [0, 0]
    assert rhs((1, 1), sub).tolist() == [-1, 0]
    sat = ScaledSat(m=1, B=2, g=1, p=0.5, f=0.5)
    assert rhs((0, 0), sat).tolist() == [-0.5, 0.5]


def test_jacobian_at_origin():
    sub = ScaledSub(m=1.3, B=2, e=2.7, q=0.4)
    assert jacobian((0, 0), sub).tolist() == [[2 - 2.7, 0], [0.4, -1]]


@settings(max_examples=200, deadline=None)
@given(
    m=st.floats(0, 5),
    B=st.floats(0.1, 10),
    loss=st.floats(0.1, 10),
    inflow=st.floats(0, 5),
    f=st.floats(0, 2),
    x=st.floats(0, 5),
    y=st.floats(0, 5),
    sat=st.booleans(),
)
def test_jacobian_matches_finite_differences(m, B, loss, inflow, f, x, y, sat):
    params = ScaledSat(m, B, loss, inflow, f) if sat else ScaledSub(m, B, loss, inflow)
    exact = jacobian((x, y), params)
    approx = finite_difference_jacobian((x, y), params)
    assert np.allclose(exact, approx, rtol=1e-6, atol=1e-5 * (1 + np.abs(exact).max()))


def test_total_population_relaxes():
    raw = RawParams(**BASE)
    for S, I, R in [(0.1, 0.3, 0.2), (3.0, 0.5, 1.0), (1.0, 2.0, 0.0)]:
        dS, dI, dR = rhs_full(S, I, R, raw)
        N = S + I + R
        assert dS + dI + dR == pytest.approx(raw.A - raw.d * N)


@pytest.mark.parametrize("I_start", [0.3, 1.6])
def test_limiting_and_scaled_systems_agree(I_start):
    raw = RawParams(**BASE)
    sub, sat = nondimensionalize(raw)
    k = scaled_time_factor(raw)

    def raw_field(_, s):
        return rhs_limiting(s[0], s[1], raw)

    def scaled_field(_, s):
        return rhs(s, sub if s[0] <= sub.x0 else sat)

    T = 0.7
    a = solve_ivp(raw_field, (0, T), (I_start, 0.2), rtol=1e-11, atol=1e-12).y[:, -1]
    b = solve_ivp(scaled_field, (0, k * T), to_scaled_state(I_start, 0.2, raw), rtol=1e-11, atol=1e-12).y[:, -1]
    assert np.allclose(a, to_raw_state(*b, raw), atol=1e-6)


@pytest.mark.parametrize("field,value", [("d", -1), ("A", 0), ("nu", -0.1), ("I0", math.nan)])
def test_invalid_raw_values_name_the_field(field, value):
    with pytest.raises(ParameterError) as info:
        RawParams(**{**BASE, field: value})
    assert info.value.field == field


def test_param_file_roundtrip_and_errors(tmp_path):
    good = tmp_path / "p.toml"
    good.write_text("\n".join(f"{k} = {v}" for k, v in RawParams(**BASE).to_mapping().items()))
    assert load_params(good) == RawParams(**BASE)

    bad = tmp_path / "bad.toml"
    bad.write_text(good.read_text().replace("lambda", "lam"))
    with pytest.raises(ParameterError, match="lam"):
        load_params(bad)
    bad.write_text(good.read_text().replace("d = 1.0", "d = -1.0"))
    with pytest.raises(ParameterError) as info:
        load_params(bad)
    assert info.value.field == "d"
    bad.write_text(good.read_text() + "\n[extra]\nx = 1\n")
    with pytest.raises(ParameterError, match="nested"):
        load_params(bad)


def test_realizability_flag():
    assert ScaledSub(1, 2, 1, 0.5).realizable
    assert not ScaledSub(1, 4, 4.5, 1).realizable


def test_regime_override():
    sub = ScaledSub(1, 2, 1, 1)
    assert rhs((1, 1), sub, Regime.SUB).tolist() == rhs((1, 1), sub, "Sub").tolist()
