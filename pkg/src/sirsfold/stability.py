"""Local classification of equilibria, degenerate normal forms and Dulac checks."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Equilibrium, Multiplicity
from .model import Regime, ScaledSat, ScaledSub, jacobian, second_partials

DET_RTOL = 1e-9
TRACE_TOL = 1e-9


class Label(str, enum.Enum):
    STABLE_NODE = "StableNode"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_NODE = "UnstableNode"
    UNSTABLE_FOCUS = "UnstableFocus"
    SADDLE = "Saddle"
    SADDLE_NODE_ATTRACTING = "SaddleNodeAttracting"
    SADDLE_NODE_REPELLING = "SaddleNodeRepelling"
    DEGENERATE_UNRESOLVED = "DegenerateUnresolved"


@dataclass
class NormalForm:
    """Taylor data at a degenerate equilibrium.

    ``a20`` and ``a11`` are the second partials F1_xx and F1_xy (not halved).
    """

    a10: float
    a01: float
    a20: float
    a11: float
    b10: float
    b01: float
    c20: float | None
    d01: float | None
    epsilon: float | None = None


@dataclass
class StabilityReport:
    equilibrium: Equilibrium
    trace: float
    determinant: float
    eigenvalues: tuple[complex, complex]
    label: Label
    normal_form: NormalForm | None = None
    diagnostics: dict = field(default_factory=dict)


def _params_for(eq: Equilibrium, sub: ScaledSub, sat: ScaledSat | None):
    return sub if eq.regime is Regime.SUB else sat


def eigenvalues_from(trace: float, det: float) -> tuple[complex, complex]:
    root = cmath.sqrt(trace * trace - 4 * det)
    pair = (0.5 * (trace + root), 0.5 * (trace - root))
    return tuple(complex(v.real, v.imag) if v.imag else complex(v.real, 0.0) for v in pair)


def matrix_eigenvalues(jac: np.ndarray) -> tuple[complex, complex]:
    if jac[0, 1] == 0.0 or jac[1, 0] == 0.0:
        # triangular: the diagonal is exact
        return complex(jac[0, 0]), complex(jac[1, 1])
    return eigenvalues_from(float(np.trace(jac)), det2(jac))


def det2(jac: np.ndarray) -> float:
    return float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])


def det_scale(jac: np.ndarray) -> float:
    return max(1.0, float(np.sum(jac * jac)))


def generic_label(trace: float, det: float, scale: float = 1.0) -> Label:
    if det < -DET_RTOL * scale:
        return Label.SADDLE
    if abs(det) <= DET_RTOL * scale or abs(trace) < TRACE_TOL:
        return Label.DEGENERATE_UNRESOLVED
    focus = trace * trace - 4 * det < 0
    if trace < 0:
        return Label.STABLE_FOCUS if focus else Label.STABLE_NODE
    return Label.UNSTABLE_FOCUS if focus else Label.UNSTABLE_NODE


def trace_formula_sub(x: float, params: ScaledSub) -> float:
    m, B, e, q = params.m, params.B, params.e, params.q
    return B - 2 * x - q * x + 2 * B * m * x - 3 * m * x * x - 2 * m * q * x * x - e - 1


def det_formula_sub(x: float, params: ScaledSub) -> float:
    m, B, e, q = params.m, params.B, params.e, params.q
    return 3 * m * (1 + q) * x * x + 2 * (1 + q - B * m) * x + e - B


def det_sign_predicate(x: float, params: ScaledSub) -> float:
    m, B, q = params.m, params.B, params.q
    return x * (2 * m * (1 + q) * x + 1 + q - B * m)


def trace_sign_predicate(x: float, params: ScaledSub) -> float:
    m, B, e, q = params.m, params.B, params.e, params.q
    return ((q + 1) ** 2 - B * m) * x + (e - B) * (q + 2) - (q + 1)


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def classify(eq: Equilibrium, sub: ScaledSub, sat: ScaledSat | None = None) -> StabilityReport:
    params = _params_for(eq, sub, sat)
    jac = jacobian((eq.x, eq.y), params, eq.regime)
    trace = float(np.trace(jac))
    det = det2(jac)
    scale = det_scale(jac)
    diagnostics: dict = {}
    if eq.regime is Regime.SUB:
        tr_f = trace_formula_sub(eq.x, sub)
        det_f = det_formula_sub(eq.x, sub)
        n1 = det_sign_predicate(eq.x, sub)
        n2 = trace_sign_predicate(eq.x, sub)
        diagnostics.update(
            trace_formula=tr_f,
            det_formula=det_f,
            det_predicate=n1,
            trace_predicate=n2,
            det_predicate_agrees=_sign(n1) == _sign(det),
            trace_predicate_agrees=_sign(n2) == _sign(trace),
        )

    if eq.is_disease_free:
        degenerate = abs(sub.B - sub.e) < 1e-9
    else:
        degenerate = abs(det) <= DET_RTOL * scale
    if degenerate:
        if eq.is_disease_free:
            report = analyze_disease_free_degenerate(sub)
        else:
            report = analyze_double_point(eq, sub, sat)
        report.diagnostics.update(diagnostics)
        return report

    return StabilityReport(
        equilibrium=eq,
        trace=trace,
        determinant=det,
        eigenvalues=matrix_eigenvalues(jac),
        label=generic_label(trace, det, scale),
        diagnostics=diagnostics,
    )


def center_manifold_coefficient(params: ScaledSub) -> float:
    """Quadratic coefficient of the flow on the center manifold of E0 when B = e.

    The manifold is tangent to (1, q); along it x' = (Bm - 1 - q) x^2 + O(x^3).
    """
    return params.B * params.m - 1 - params.q


def printed_center_coefficient(params: ScaledSub) -> float:
    """2(Bm - 1) - q: the same reduction applied to the printed expansion x' = 2(Bm-1)x^2 - xy."""
    return 2 * (params.B * params.m - 1) - params.q


def analyze_disease_free_degenerate(params: ScaledSub) -> StabilityReport:
    if abs(params.B - params.e) >= 1e-9:
        raise ValueError("disease-free point is hyperbolic unless B = e")
    eq = Equilibrium(0.0, 0.0, Regime.SUB)
    jac = jacobian((0.0, 0.0), params, Regime.SUB)
    trace = float(np.trace(jac))
    det = det2(jac)
    fxx, fxy, _ = second_partials((0.0, 0.0), params)
    c = center_manifold_coefficient(params)
    if abs(c) < 1e-9:
        label = Label.DEGENERATE_UNRESOLVED
    else:
        # one-sided on x > 0: c < 0 pulls the center direction back to the origin
        label = Label.SADDLE_NODE_ATTRACTING if c < 0 else Label.SADDLE_NODE_REPELLING
    nf = NormalForm(
        a10=float(jac[0, 0]),
        a01=float(jac[0, 1]),
        a20=fxx,
        a11=fxy,
        b10=float(jac[1, 0]),
        b01=-1.0,
        c20=c,
        d01=None,
    )
    bm1_stable = params.B * params.m - 1 < 0
    return StabilityReport(
        equilibrium=eq,
        trace=trace,
        determinant=det,
        eigenvalues=matrix_eigenvalues(jac),
        label=label,
        normal_form=nf,
        diagnostics={
            "center_coefficient": c,
            "printed_center_coefficient": printed_center_coefficient(params),
            "bm1_label": "stable saddle" if bm1_stable else "unstable saddle",
            "bm1_criterion_agrees": (c < 0) == bm1_stable,
        },
    )


def double_point_coefficients(eq: Equilibrium, params: ScaledSub | ScaledSat) -> NormalForm:
    jac = jacobian((eq.x, eq.y), params, eq.regime)
    fxx, fxy, _ = second_partials((eq.x, eq.y), params)
    a10, a01 = float(jac[0, 0]), float(jac[0, 1])
    b10 = float(jac[1, 0])
    denom = 1 - a10
    c20 = (fxx + b10 * fxy) / denom if denom != 0 else None
    d01 = b10 / denom if denom != 0 else None
    eps = trace_sign_predicate(eq.x, params) if isinstance(params, ScaledSub) else None
    return NormalForm(a10=a10, a01=a01, a20=fxx, a11=fxy, b10=b10, b01=-1.0, c20=c20, d01=d01, epsilon=eps)


def transformed_linearization(nf: NormalForm) -> np.ndarray:
    """Linear part after u = u1 - a01 v1, v = b10 u1 + v1 and dt = -(a10 + 1) dtau."""
    jac = np.array([[nf.a10, nf.a01], [nf.b10, nf.b01]])
    T = np.array([[1.0, -nf.a01], [nf.b10, 1.0]])
    return -(nf.a10 + 1) * np.linalg.solve(T, jac @ T)


def analyze_double_point(eq: Equilibrium, sub: ScaledSub, sat: ScaledSat | None = None) -> StabilityReport:
    params = _params_for(eq, sub, sat)
    nf = double_point_coefficients(eq, params)
    jac = jacobian((eq.x, eq.y), params, eq.regime)
    trace = float(np.trace(jac))
    det = det2(jac)
    degeneracy = -nf.a10 - nf.b10 * nf.a01

    if abs(1 - nf.a10) < 1e-9 or nf.c20 is None:
        label = Label.DEGENERATE_UNRESOLVED
    elif nf.a10 > 1 and nf.c20 < 0:
        label = Label.SADDLE_NODE_REPELLING
    elif nf.a10 < 1 and nf.c20 > 0:
        label = Label.SADDLE_NODE_ATTRACTING
    else:
        label = Label.DEGENERATE_UNRESOLVED

    diagnostics = {"degeneracy_identity": degeneracy}
    if abs(nf.a10 + 1) > 1e-12:
        lin = transformed_linearization(nf)
        diagnostics["transformed_eigenvalues"] = sorted(np.linalg.eigvals(lin).real.tolist())
        diagnostics["transformed_v_rate"] = float(lin[1, 1])
        # the printed d01 would have to equal this rate for the transformed system to match
        diagnostics["printed_d01_rate"] = None if nf.d01 is None else nf.d01 * -(nf.a10 + 1)
    return StabilityReport(
        equilibrium=eq,
        trace=trace,
        determinant=det,
        eigenvalues=eigenvalues_from(trace, det),
        label=label,
        normal_form=nf,
        diagnostics=diagnostics,
    )


@dataclass
class DulacCertificate:
    condition_id: str
    holds: bool
    witness: dict


def dulac_divergence_sub(x, y, params: ScaledSub):
    """div(D P, D Q) for D = 1/(x y) in the Sub regime."""
    m, B, q = params.m, params.B, params.q
    return (-m * y * y + (m * B - 1 - 2 * m * x) * y - q) / (y * y)


def dulac_divergence_sat(x, y, params: ScaledSat):
    """div(D P, D Q) for D = 1/(x0 y) in the Sat regime, from exact differentiation."""
    m, B, g, p, f, x0 = params.m, params.B, params.g, params.p, params.f, params.x0
    px_ = (1 + 2 * m * x) * (B - x - y) - x * (1 + m * x) - g
    return (y * px_ - (p * x + f)) / (x0 * y * y)


def dulac_divergence_sat_printed(x, y, params: ScaledSat):
    m, B, g, p, f, x0 = params.m, params.B, params.g, params.p, params.f, params.x0
    lin = -3 * m * x * x + 2 * m * (B - 1) * x - x + (B - g)
    return (-y * y + lin * y - p * x - f) / (x0 * y * y)


def dulac_grid_max(params: ScaledSub, x_max: float, y_max: float, n: int = 50) -> float:
    xs = np.linspace(x_max / n, x_max, n)
    ys = np.linspace(y_max / n, y_max, n)
    X, Y = np.meshgrid(xs, ys)
    return float(np.max(dulac_divergence_sub(X, Y, params)))


def dulac_certificate(sub: ScaledSub, sat: ScaledSat) -> list[DulacCertificate]:
    m, B, e, q, g = sub.m, sub.B, sub.e, sub.q, sat.g
    cond1 = DulacCertificate(
        "Cond1",
        e - B > 0 and m <= (1 + q) / B,
        {"e_minus_B": e - B, "m": m, "m_bound": (1 + q) / B},
    )
    cond2 = DulacCertificate(
        "Cond2",
        B < 1 < g and m * B < 1,
        {"B": B, "g": g, "mB": m * B},
    )
    return [cond1, cond2]


def globally_stable_disease_free(certs: list[DulacCertificate]) -> bool:
    return any(c.holds for c in certs)
