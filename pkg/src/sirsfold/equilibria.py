"""Equilibria of both treatment regimes and their existence cases.

Sub-regime endemic points solve the quadratic

    h(x) = m(1+q) x^2 + (1+q-Bm) x + e - B,    y = q x

and Sat-regime points solve the cubic

    F(x) = m(1+p) x^3 + (1+p+mf-Bm) x^2 + (g+f-B) x + f,    y = p x + f.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .model import Regime, ScaledSat, ScaledSub, rhs_sat, rhs_sub
from .polyroots import polyder, polyval, real_roots

DISCRIMINANT_RTOL = 1e-12


class Multiplicity(str, enum.Enum):
    SIMPLE = "Simple"
    DOUBLE = "Double"


class ExistenceCase(str, enum.Enum):
    NO_POSITIVE_SMALL_M = "NoPositive_SmallM"  # case 1
    TWO_POSITIVE = "TwoPositive"  # case 2
    DOUBLE_POSITIVE = "DoublePositive"  # case 3
    NO_POSITIVE_LARGE_E = "NoPositive_LargeE"  # case 4
    ONE_POSITIVE = "OnePositive"  # case 5


@dataclass(frozen=True)
class Equilibrium:
    x: float
    y: float
    regime: Regime
    multiplicity: Multiplicity = Multiplicity.SIMPLE
    admissible: bool = True

    @property
    def is_disease_free(self) -> bool:
        return self.regime is Regime.SUB and self.x == 0.0 and self.y == 0.0

    def residual(self, sub: ScaledSub, sat: ScaledSat | None = None) -> float:
        if self.regime is Regime.SUB:
            fx, fy = rhs_sub(self.x, self.y, sub)
        else:
            fx, fy = rhs_sat(self.x, self.y, sat)
        return max(abs(fx), abs(fy))


@dataclass
class EquilibriumCatalog:
    disease_free: Equilibrium
    endemic: list[Equilibrium]
    theorem1_case: ExistenceCase | None
    R0: float
    P1_hat: float
    P2_hat: float
    sub: ScaledSub = field(repr=False)
    sat: ScaledSat = field(repr=False)

    @property
    def all(self) -> list[Equilibrium]:
        return [self.disease_free, *self.endemic]

    def endemic_in(self, regime: Regime) -> list[Equilibrium]:
        return [eq for eq in self.endemic if eq.regime is regime]


def r0(params: ScaledSub) -> float:
    return params.B / params.e


def sub_coefficients(params: ScaledSub) -> tuple[float, float, float]:
    m, B, e, q = params.m, params.B, params.e, params.q
    return m * (1 + q), 1 + q - B * m, e - B


def sub_discriminant(params: ScaledSub) -> float:
    a, b, c = sub_coefficients(params)
    return b * b - 4 * a * c


def h(x: float, params: ScaledSub) -> float:
    return polyval(sub_coefficients(params), x)


def h_prime(x: float, params: ScaledSub) -> float:
    a, b, _ = sub_coefficients(params)
    return 2 * a * x + b


def solve_sub_endemic(params: ScaledSub) -> list[tuple[float, Multiplicity]]:
    """Positive roots of h, ascending."""
    a, b, c = sub_coefficients(params)
    if a == 0.0:
        # bilinear incidence: (1+q) x = B - e
        x = -c / b
        return [(x, Multiplicity.SIMPLE)] if x > 0 else []
    disc = b * b - 4 * a * c
    if abs(disc) < DISCRIMINANT_RTOL * max(1.0, b * b):
        x = -b / (2 * a)
        return [(x, Multiplicity.DOUBLE)] if x > 0 else []
    if disc < 0:
        return []
    # cancellation-free pair of quadratic-formula roots
    t = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    candidates = [t / a, c / t] if t != 0.0 else [0.0, 0.0]
    return [(x, Multiplicity.SIMPLE) for x in sorted(candidates) if x > 0]


def sat_coefficients(params: ScaledSat) -> tuple[float, float, float, float]:
    m, B, g, p, f = params.m, params.B, params.g, params.p, params.f
    return m * (1 + p), 1 + p + m * f - B * m, g + f - B, f


def F(x: float, params: ScaledSat) -> float:
    return polyval(sat_coefficients(params), x)


def F_prime(x: float, params: ScaledSat) -> float:
    return polyval(polyder(sat_coefficients(params)), x)


def solve_sat_endemic(params: ScaledSat) -> list[tuple[float, Multiplicity]]:
    """Positive real roots of F, ascending, via companion-matrix eigenvalues."""
    coeffs = list(sat_coefficients(params))
    if params.f == 0.0:
        # the x = 0 factor lies outside the Sat domain
        coeffs = coeffs[:-1]
    roots = real_roots(coeffs)
    out = []
    for root in roots:
        if root.x > 0:
            out.append((root.x, Multiplicity.DOUBLE if root.double else Multiplicity.SIMPLE))
    return out


def depressed_case_holds(params: ScaledSat, tol: float = 1e-12) -> bool:
    """True when the quadratic term of F vanishes (p = Bm - mf - 1)."""
    _, b2, _, _ = sat_coefficients(params)
    return abs(b2) < tol * max(1.0, params.B * params.m)


def depressed_st(params: ScaledSat) -> tuple[float, float]:
    """(s, t) of the depressed cubic x^3 + s x + t when the quadratic term vanishes."""
    lead, _, c1, c0 = sat_coefficients(params)
    return c1 / lead, c0 / lead


def depressed_double_root(params: ScaledSat) -> float:
    """Closed-form double root cbrt(t/2) of the depressed cubic."""
    _, t = depressed_st(params)
    return math.copysign(abs(t / 2) ** (1 / 3), t)


def fold_cubic_gap(params: ScaledSat) -> float:
    """-27 m(1+p) f^2 - 4(g+f-B)^3; zero at the depressed double root, positive for two positive roots."""
    lead, _, c1, _ = sat_coefficients(params)
    return -27 * lead * params.f**2 - 4 * c1**3


def fold_cubic_gap_variant(params: ScaledSat) -> float:
    """-27 m^2 f^2 (B-f) - 4(g+f-B)^3, the variant printed inside the proof."""
    _, _, c1, _ = sat_coefficients(params)
    return -27 * params.m**2 * params.f**2 * (params.B - params.f) - 4 * c1**3


def existence_case(params: ScaledSub) -> ExistenceCase | None:
    """Existence case decided from the signs of e-B, Bm-q-1 and the discriminant.

    Returns None for e = B with Bm <= 1+q, which none of the five cases covers.
    """
    m, B, e, q = params.m, params.B, params.e, params.q
    if B > e:
        return ExistenceCase.ONE_POSITIVE
    axis = B * m - q - 1
    if B == e:
        return ExistenceCase.ONE_POSITIVE if m > 0 and axis > 0 else None
    if m == 0 or axis <= 0:
        return ExistenceCase.NO_POSITIVE_SMALL_M
    disc = sub_discriminant(params)
    _, b, _ = sub_coefficients(params)
    if abs(disc) < DISCRIMINANT_RTOL * max(1.0, b * b):
        return ExistenceCase.DOUBLE_POSITIVE
    return ExistenceCase.TWO_POSITIVE if disc > 0 else ExistenceCase.NO_POSITIVE_LARGE_E


def existence_case_from_r0(params: ScaledSub) -> ExistenceCase | None:
    """The same case read off the R0 = B/e inequalities (consistency check only)."""
    m, B, e, q = params.m, params.B, params.e, params.q
    R0 = r0(params)
    if R0 >= 1:
        return ExistenceCase.ONE_POSITIVE
    if m <= (1 + q) / B:
        return ExistenceCase.NO_POSITIVE_SMALL_M
    bound = 1 - (1 + q - B * m) ** 2 / (4 * m * e * (1 + q))
    if math.isclose(R0, bound, rel_tol=1e-12, abs_tol=1e-14):
        return ExistenceCase.DOUBLE_POSITIVE
    return ExistenceCase.TWO_POSITIVE if R0 > bound else ExistenceCase.NO_POSITIVE_LARGE_E


EXPECTED_COUNTS = {
    ExistenceCase.NO_POSITIVE_SMALL_M: (),
    ExistenceCase.TWO_POSITIVE: (Multiplicity.SIMPLE, Multiplicity.SIMPLE),
    ExistenceCase.DOUBLE_POSITIVE: (Multiplicity.DOUBLE,),
    ExistenceCase.NO_POSITIVE_LARGE_E: (),
    ExistenceCase.ONE_POSITIVE: (Multiplicity.SIMPLE,),
}


def thresholds_p1_p2(params: ScaledSub) -> tuple[float, float]:
    """Threshold values of R0 bounding the position of the smaller root relative to x0.

    The second threshold is transcribed as printed; admissibility never depends on it.
    """
    m, e, q, x0 = params.m, params.e, params.q, params.x0
    if m == 0 or math.isinf(x0):
        return math.inf, math.inf
    P1 = (q + 1) / (m * e) + 2 * x0 * (1 + q) / e
    P2 = 1 / (1 + m * x0) + m * (1 + q) * x0**2 / (e * (1 + m * x0)) + (q + 1) * x0 / (1 + m * x0)
    return P1, P2


def ordering_condition(params: ScaledSub) -> bool:
    """The printed ordering condition me - q - 1 > m^2(3+q)x0^2 + m(3q+3-qe-q)x0."""
    m, e, q, x0 = params.m, params.e, params.q, params.x0
    return m * e - q - 1 > m**2 * (3 + q) * x0**2 + m * (3 * q + 3 - q * e - q) * x0


def threshold_prediction(params: ScaledSub) -> dict[str, bool]:
    """Existence of E1/E2 inside (0, x0] as predicted from the R0 thresholds alone."""
    P1, P2 = thresholds_p1_p2(params)
    R0 = r0(params)
    if ordering_condition(params):
        if R0 <= P1:
            return {"E1": True, "E2": True}
        if R0 < P2:
            return {"E1": True, "E2": True}
        return {"E1": True, "E2": False}
    return {"E1": True, "E2": R0 >= P2}


def sat_admissibility_predicates(params: ScaledSat) -> dict[str, bool]:
    """Both forms of the E3 > x0 test: f > m(1+p)x0^3 as printed, f > 2m(1+p)x0^3 as derived."""
    lead = params.m * (1 + params.p)
    return {
        "printed": params.f > lead * params.x0**3,
        "derived": params.f > 2 * lead * params.x0**3,
    }


def catalog(sub: ScaledSub, sat: ScaledSat) -> EquilibriumCatalog:
    x0 = sub.x0
    endemic = [
        Equilibrium(x, sub.q * x, Regime.SUB, mult, admissible=bool(x <= x0))
        for x, mult in solve_sub_endemic(sub)
    ]
    endemic += [
        Equilibrium(x, sat.p * x + sat.f, Regime.SAT, mult, admissible=bool(x > x0))
        for x, mult in solve_sat_endemic(sat)
    ]
    endemic.sort(key=lambda eq: (eq.x, eq.regime.value))
    P1, P2 = thresholds_p1_p2(sub)
    return EquilibriumCatalog(
        disease_free=Equilibrium(0.0, 0.0, Regime.SUB),
        endemic=endemic,
        theorem1_case=existence_case(sub),
        R0=r0(sub),
        P1_hat=P1,
        P2_hat=P2,
        sub=sub,
        sat=sat,
    )
