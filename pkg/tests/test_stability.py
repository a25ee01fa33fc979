import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirsfold.acceptance import simulate_center_direction
from sirsfold.bifurcation import at_fold
from sirsfold.equilibria import Equilibrium, Multiplicity, catalog, solve_sub_endemic
from sirsfold.model import Regime, ScaledSat, ScaledSub, jacobian
from sirsfold.stability import (
    Label,
    analyze_disease_free_degenerate,
    analyze_double_point,
    center_manifold_coefficient,
    classify,
    det_sign_predicate,
    dulac_certificate,
    dulac_divergence_sat,
    dulac_grid_max,
    generic_label,
    printed_center_coefficient,
)

E0 = Equilibrium(0.0, 0.0, Regime.SUB)


def test_origin_hyperbolic_cases():
    rep = classify(E0, ScaledSub(1, 1, 2, 1))
    assert sorted(v.real for v in rep.eigenvalues) == [-1, -1]
    assert rep.label is Label.STABLE_NODE
    rep = classify(E0, ScaledSub(1, 3, 1, 1))
    assert rep.label is Label.SADDLE
    assert sorted(v.real for v in rep.eigenvalues) == [-1, 2]


def test_unique_endemic_point_has_positive_det():
    sub = ScaledSub(m=1, B=2, e=1, q=1)
    (x, _), = solve_sub_endemic(sub)
    rep = classify(Equilibrium(x, x, Regime.SUB), sub)
    assert rep.determinant > 0
    assert rep.determinant == pytest.approx(float(np.linalg.det(jacobian((x, x), sub))))
    assert rep.label in (Label.STABLE_NODE, Label.STABLE_FOCUS)


@settings(max_examples=300, deadline=None)
@given(m=st.floats(0.01, 5), B=st.floats(0.1, 10), e=st.floats(0.1, 10), q=st.floats(0, 5))
def test_det_sign_matches_predicate(m, B, e, q):
    sub = ScaledSub(m, B, e, q)
    for x, mult in solve_sub_endemic(sub):
        if mult is Multiplicity.DOUBLE:
            continue
        det = float(np.linalg.det(jacobian((x, q * x), sub)))
        pred = det_sign_predicate(x, sub)
        if abs(pred) > 1e-8 * (1 + x * (1 + q + B * m)):
            assert np.sign(det) == np.sign(pred)


@settings(max_examples=200, deadline=None)
@given(tr=st.floats(-10, 10), det=st.floats(-10, 10))
def test_generic_label_matches_eigenvalues(tr, det):
    label = generic_label(tr, det)
    disc = cmath.sqrt(tr * tr - 4 * det)
    lams = [(tr + disc) / 2, (tr - disc) / 2]
    if label is Label.SADDLE:
        assert lams[0].real > 0 > lams[1].real
    elif label in (Label.STABLE_NODE, Label.STABLE_FOCUS):
        assert all(v.real < 0 for v in lams)
    elif label in (Label.UNSTABLE_NODE, Label.UNSTABLE_FOCUS):
        assert all(v.real > 0 for v in lams)


def test_degenerate_origin_examples():
    attracting = analyze_disease_free_degenerate(ScaledSub(1, 1, 1, 1))
    assert attracting.label is Label.SADDLE_NODE_ATTRACTING
    assert center_manifold_coefficient(ScaledSub(1, 1, 1, 1)) == -1
    repelling = analyze_disease_free_degenerate(ScaledSub(4, 1, 1, 1))
    assert repelling.label is Label.SADDLE_NODE_REPELLING
    assert repelling.diagnostics["bm1_criterion_agrees"]
    assert analyze_disease_free_degenerate(ScaledSub(2, 1, 1, 1)).label is Label.DEGENERATE_UNRESOLVED


def test_corrected_center_coefficient_differs_from_printed_one():
    # Bm - 1 - q = -0.5 (attracting), 2(Bm - 1) - q = 1 (would say repelling)
    p = ScaledSub(m=2.5, B=1, e=1, q=2)
    assert center_manifold_coefficient(p) == pytest.approx(-0.5)
    assert printed_center_coefficient(p) == pytest.approx(1)
    assert simulate_center_direction(p) == "attracting"
    assert analyze_disease_free_degenerate(p).label is Label.SADDLE_NODE_ATTRACTING


@settings(max_examples=8, deadline=None)
@given(m=st.floats(0.1, 4), B=st.floats(0.3, 3), q=st.floats(0.1, 2))
def test_center_coefficient_agrees_with_simulation(m, B, q):
    p = ScaledSub(m, B, B, q)
    c = center_manifold_coefficient(p)
    if abs(c) < 0.2:
        return
    expected = "attracting" if c < 0 else "repelling"
    assert simulate_center_direction(p) == expected


def test_double_point_symmetric_example():
    eq = Equilibrium(0.5, 0.5, Regime.SUB, Multiplicity.DOUBLE)
    rep = analyze_double_point(eq, ScaledSub(1, 4, 4.5, 1))
    nf = rep.normal_form
    assert nf.a01 == pytest.approx(-0.75)
    assert nf.a10 == pytest.approx(0.75)
    assert nf.a11 == pytest.approx(-2) and nf.a20 == pytest.approx(2)
    assert nf.c20 == pytest.approx(0, abs=1e-12)
    assert rep.label is Label.DEGENERATE_UNRESOLVED
    assert rep.diagnostics["degeneracy_identity"] == pytest.approx(0, abs=1e-12)
    assert min(abs(v) for v in rep.diagnostics["transformed_eigenvalues"]) < 1e-12


def test_double_point_attracting_example():
    sub = at_fold(ScaledSub(m=1, B=3, e=1, q=1))
    cat = catalog(sub, ScaledSat(1, 3, 1, 1, 0))
    (double,) = [eq for eq in cat.endemic if eq.multiplicity is Multiplicity.DOUBLE]
    assert double.x == pytest.approx(0.25)
    rep = classify(double, sub)
    assert rep.label is Label.SADDLE_NODE_ATTRACTING
    assert rep.normal_form.c20 > 0 and rep.normal_form.a10 < 1
    assert rep.normal_form.epsilon != 0


def test_dulac_certificates():
    sub = ScaledSub(m=0.2, B=1, e=2, q=1)
    sat = ScaledSat(m=0.2, B=1, g=1.5, p=0.5, f=0.1)
    cond1, cond2 = dulac_certificate(sub, sat)
    assert cond1.holds and not cond2.holds  # B = 1 is not < 1
    sub = ScaledSub(m=1, B=0.5, e=2, q=1)
    sat = ScaledSat(m=1, B=0.5, g=1.5, p=0.5, f=0.1)
    assert [c.holds for c in dulac_certificate(sub, sat)] == [True, True]
    assert dulac_grid_max(sub, 5, 5) < 0


def test_cond1_does_not_force_negative_divergence():
    sub = ScaledSub(m=0.2, B=10, e=11, q=1.1)
    assert dulac_certificate(sub, ScaledSat(0.2, 10, 11, 1, 0))[0].holds
    assert dulac_grid_max(sub, 10, 10, 200) > 0


def test_sat_divergence_by_finite_differences():
    sat = ScaledSat(m=0.7, B=2, g=1.2, p=0.4, f=0.3, x0=1.5)
    from sirsfold.model import rhs_sat

    def weighted(x, y):
        fx, fy = rhs_sat(x, y, sat)
        return fx / (sat.x0 * y), fy / (sat.x0 * y)

    x, y, h = 0.8, 0.6, 1e-6
    div = (weighted(x + h, y)[0] - weighted(x - h, y)[0]) / (2 * h) + (weighted(x, y + h)[1] - weighted(x, y - h)[1]) / (2 * h)
    assert dulac_divergence_sat(x, y, sat) == pytest.approx(div, rel=1e-6)
