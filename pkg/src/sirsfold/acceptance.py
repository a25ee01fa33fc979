"""Built-in acceptance suite shared by ``sirsfold verify`` and the test suite.

Every criterion returns a :class:`CriterionResult`; ``passed`` covers only the
asserted quantities, while ``reported`` carries comparisons that are recorded
but not asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .bifurcation import e_sn, fold_point, gap_scaling_exponent, sotomayor
from .equilibria import (
    EXPECTED_COUNTS,
    Multiplicity,
    ExistenceCase,
    catalog,
    sat_coefficients,
    solve_sat_endemic,
    solve_sub_endemic,
    sub_coefficients,
    sub_discriminant,
    existence_case,
    existence_case_from_r0,
)
from .model import RawParams, ScaledSat, ScaledSub, load_params, nondimensionalize
from .polyroots import polyder, polyval
from .simulate import hermite, integrate
from .stability import (
    analyze_disease_free_degenerate,
    analyze_double_point,
    center_manifold_coefficient,
    classify,
    dulac_certificate,
    dulac_grid_max,
    printed_center_coefficient,
    transformed_linearization,
)
from .equilibria import Equilibrium
from .model import Regime

SEED = 20241016

TOLERANCES = {
    "residual": 1e-9,
    "root_oracle": 1e-8,
    "vieta": 1e-10,
    "fold_discriminant": 1e-10,
    "fold_root": 1e-10,
    "fold_offset": 1e-3,
    "sotomayor_rel": 1e-8,
    "gap_exponent": 0.05,
    "origin_radius": 1e-4,
    "origin_time": 500.0,
    "growth_factor": 10.0,
    "growth_time": 20.0,
    "degenerate_hit_rate": 0.95,
    "degeneracy_identity": 1e-8,
    "transform_eigen": 1e-8,
    "integrator_tol": 1e-8,
    "event_time": 1e-10,
    "negativity": 1e-9,
}

COUNTS = {
    "draws": 10_000,
    "case_draws": 100,
    "fold_draws": 1_000,
    "degenerate_draws": 100,
    "dulac_draws": 200,
    "unstable_draws": 50,
}

SHIPPED = ("fold", "cond1", "cond2", "endemic")

# starts with x(0) above the switching line, chosen so the Sat field pushes x down
INTEGRATOR_STARTS = {
    "fold": (1.5, 2.0),
    "cond1": (0.5, 0.5),
    "cond2": (0.5, 0.5),
    "endemic": (2.0, 0.5),
}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict
    reported: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d}. {self.name}: {parts}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def shipped_params(name: str) -> RawParams:
    ref = resources.files("sirsfold") / "data" / f"{name}.toml"
    with resources.as_file(ref) as path:
        return load_params(path)


def _open_unit(rng, size=None):
    """Uniform on (0, 1]."""
    return 1.0 - rng.random(size)


def random_draws(rng, count: int) -> list[tuple[ScaledSub, ScaledSat]]:
    """Scaled parameter pairs with m in (0,5], B,e in (0,10], q in (0,min(e,5)), x0 in (0,2].

    The Sat regime shares m, B, x0 and takes g in (0,10], p in (0,5), f in (0,2].
    """
    out = []
    for _ in range(count):
        m = 5 * _open_unit(rng)
        B = 10 * _open_unit(rng)
        e = 10 * _open_unit(rng)
        q = min(e, 5) * rng.random()
        while q == 0.0:
            q = min(e, 5) * rng.random()
        x0 = 2 * _open_unit(rng)
        g = 10 * _open_unit(rng)
        p = 5 * rng.random()
        f = 2 * _open_unit(rng)
        out.append((ScaledSub(m, B, e, q, x0), ScaledSat(m, B, g, p, f, x0)))
    return out


# ---------------------------------------------------------------------------
# independent root oracles


def _bracketed_roots(coeffs, lo: float, hi: float, breaks) -> list[float]:
    pts = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    roots = []
    for a, b in zip(pts[:-1], pts[1:]):
        fa, fb = polyval(coeffs, a), polyval(coeffs, b)
        if fa == 0.0 and a > lo:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(lambda x: polyval(coeffs, x), a, b, xtol=1e-15, rtol=1e-15, maxiter=200))
    return roots


def _cauchy_bound(coeffs) -> float:
    lead = coeffs[0]
    return 1.0 + max(abs(c / lead) for c in coeffs[1:])


def oracle_positive_roots(coeffs, double_tol: float = 1e-12) -> list[tuple[float, bool]]:
    """Positive real roots by sign-change bisection between critical points.

    Tangential (double) roots are recognized at critical points where the
    polynomial nearly vanishes.
    """
    coeffs = [float(c) for c in coeffs]
    while coeffs and coeffs[0] == 0.0:
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return []
    d = polyder(coeffs)
    if len(d) == 3:
        a, b, c = d
        disc = b * b - 4 * a * c
        crit = [] if disc < 0 else [(-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)]
    elif len(d) == 2:
        crit = [-d[1] / d[0]]
    else:
        crit = []
    bound = _cauchy_bound(coeffs)
    scale = max(abs(c) for c in coeffs)
    doubles = [x for x in crit if x > 0 and abs(polyval(coeffs, x)) <= double_tol * scale]
    breaks = [x for x in crit if x > 0]
    simple = [
        r for r in _bracketed_roots(coeffs, 0.0, bound, breaks) if all(abs(r - x) > 1e-7 * max(1, x) for x in doubles)
    ]
    out = [(r, False) for r in simple] + [(x, True) for x in doubles]
    return sorted(out)


def _match(found, oracle, tol) -> tuple[bool, float]:
    if len(found) != len(oracle):
        return False, math.inf
    if not found:
        return True, 0.0
    err = max(abs(a - b) for a, b in zip(sorted(found), sorted(oracle)))
    return err <= tol, err


# ---------------------------------------------------------------------------
# criteria


def criterion_residuals(tol, draws) -> CriterionResult:
    worst = 0.0
    n_eq = 0
    for sub, sat in draws:
        cat = catalog(sub, sat)
        for eq in cat.all:
            worst = max(worst, eq.residual(sub, sat))
            n_eq += 1
    return CriterionResult(
        1,
        "equilibrium residuals",
        worst < tol["residual"],
        {"draws": len(draws), "equilibria": n_eq, "max_residual": worst, "tol": tol["residual"]},
    )


def criterion_root_oracles(tol, draws) -> CriterionResult:
    worst_quad = worst_cubic = worst_vieta = 0.0
    mismatches = 0
    vieta_checked = 0
    for sub, sat in draws:
        quad = solve_sub_endemic(sub)
        q_oracle = oracle_positive_roots(sub_coefficients(sub))
        ok, err = _match([x for x, _ in quad], [x for x, _ in q_oracle], tol["root_oracle"])
        mismatches += not ok
        worst_quad = max(worst_quad, err)

        coeffs = list(sat_coefficients(sat))
        cubic = solve_sat_endemic(sat)
        c_oracle = oracle_positive_roots(coeffs)
        ok, err = _match([x for x, _ in cubic], [x for x, _ in c_oracle], tol["root_oracle"])
        mismatches += not ok
        worst_cubic = max(worst_cubic, err)

        if len(quad) == 2:
            a, b, c = sub_coefficients(sub)
            s_exp, p_exp = -b / a, c / a
            s_got = quad[0][0] + quad[1][0]
            p_got = quad[0][0] * quad[1][0]
            vieta = max(abs(s_got - s_exp) / max(1, abs(s_exp)), abs(p_got - p_exp) / max(1, abs(p_exp)))
            worst_vieta = max(worst_vieta, vieta)
            vieta_checked += 1
    passed = mismatches == 0 and worst_vieta <= tol["vieta"]
    return CriterionResult(
        2,
        "root-oracle equivalence",
        passed,
        {
            "mismatches": mismatches,
            "max_quadratic_err": worst_quad,
            "max_cubic_err": worst_cubic,
            "vieta_checked": vieta_checked,
            "max_vieta_rel_err": worst_vieta,
        },
    )


def case_generator(case: ExistenceCase, rng) -> ScaledSub:
    """Parameters satisfying one existence case's primitive sign conditions."""
    while True:
        B = 10 * _open_unit(rng)
        q = 5 * rng.random()
        if case is ExistenceCase.ONE_POSITIVE:
            m = 5 * _open_unit(rng)
            e = B * rng.uniform(0.01, 0.99)
            if e <= q:
                continue
            return ScaledSub(m, B, e, q)
        if case is ExistenceCase.NO_POSITIVE_SMALL_M:
            m = (1 + q) / B * _open_unit(rng)
            e = B + 5 * _open_unit(rng)
            if m > 5 or e <= q:
                continue
            return ScaledSub(m, B, e, q)
        m = (1 + q) / B + 5 * _open_unit(rng)
        if m > 5:
            continue
        base = ScaledSub(m, B, B + 1.0, q)
        eSN = e_sn(base)
        if eSN - B < 1e-6:
            continue
        if case is ExistenceCase.DOUBLE_POSITIVE:
            e = eSN
        elif case is ExistenceCase.TWO_POSITIVE:
            e = B + (eSN - B) * rng.uniform(0.01, 0.99)
        else:
            e = eSN + (eSN - B) * rng.uniform(0.01, 2.0)
        if e <= q:
            continue
        return ScaledSub(m, B, e, q)


def criterion_case_coverage(tol, rng, per_case: int) -> CriterionResult:
    measured = {}
    statement_disagreements = 0
    all_ok = True
    for case in ExistenceCase:
        hits = 0
        for _ in range(per_case):
            params = case_generator(case, rng)
            roots = solve_sub_endemic(params)
            mults = tuple(m for _, m in roots)
            if mults == EXPECTED_COUNTS[case] and existence_case(params) is case:
                hits += 1
            if existence_case_from_r0(params) is not case:
                statement_disagreements += 1
        measured[case.value] = f"{hits}/{per_case}"
        all_ok &= hits == per_case
    return CriterionResult(
        3,
        "existence case coverage",
        all_ok,
        measured,
        {"statement_inequality_disagreements": statement_disagreements},
    )


def fold_draws(rng, count: int, min_gap: float) -> list[ScaledSub]:
    """Fold parameter sets with m > (1+q)/B and e_SN - B > min_gap, placed at e = e_SN."""
    out = []
    while len(out) < count:
        m = 5 * _open_unit(rng)
        B = 10 * _open_unit(rng)
        q = 5 * rng.random()
        if q == 0.0 or not m > (1 + q) / B:
            continue
        params = ScaledSub(m, B, B + 1.0, q)
        eSN = e_sn(params)
        # both fold branches must stay positive at e_SN - offset
        if eSN - B <= min_gap:
            continue
        out.append(replace(params, e=eSN))
    return out


def criterion_fold(tol, folds) -> CriterionResult:
    worst_disc = worst_root = 0.0
    bad = 0
    off = tol["fold_offset"]
    for params in folds:
        disc = sub_discriminant(params)
        roots = solve_sub_endemic(params)
        x_star, _ = fold_point(params)
        worst_disc = max(worst_disc, abs(disc))
        if len(roots) != 1 or roots[0][1] is not Multiplicity.DOUBLE:
            bad += 1
            continue
        worst_root = max(worst_root, abs(roots[0][0] - x_star))
        below = solve_sub_endemic(replace(params, e=params.e - off))
        above = solve_sub_endemic(replace(params, e=params.e + off))
        if len(below) != 2 or len(above) != 0:
            bad += 1
    passed = bad == 0 and worst_disc < tol["fold_discriminant"] and worst_root < tol["fold_root"]
    return CriterionResult(
        4,
        "fold identity",
        passed,
        {"folds": len(folds), "failures": bad, "max_abs_discriminant": worst_disc, "max_root_err": worst_root},
    )


def criterion_sotomayor(tol, folds) -> CriterionResult:
    worst_rel = 0.0
    exps = []
    agree = 0
    dev = []
    w_colinear = 0
    for params in folds:
        rep = sotomayor(params)
        expected = -params.q * rep.xStar
        worst_rel = max(worst_rel, abs(rep.wF_e - expected) / abs(expected))
        exps.append(gap_scaling_exponent(params))
        d = rep.checks["wD2F_relative_deviation"]
        dev.append(d)
        agree += d < 1e-6
        w_colinear += rep.checks["w_printed_colinear"]
    exps = np.array(exps)
    worst_exp = float(np.max(np.abs(exps - 0.5)))
    passed = worst_rel < tol["sotomayor_rel"] and worst_exp <= tol["gap_exponent"]
    return CriterionResult(
        5,
        "Sotomayor fold",
        passed,
        {"folds": len(folds), "max_wFe_rel_err": worst_rel, "exponent_min": float(exps.min()), "exponent_max": float(exps.max())},
        {
            "printed_wD2F_agreements": f"{agree}/{len(folds)}",
            "printed_wD2F_median_rel_dev": float(np.median(dev)),
            "printed_w_colinear": f"{w_colinear}/{len(folds)}",
        },
    )


def _grid_starts(n: int = 10) -> list[tuple[float, float]]:
    vals = np.linspace(1 / n, 1.0, n)
    return [(float(a), float(b)) for a in vals for b in vals]


def criterion_disease_free(tol, draws, rng) -> CriterionResult:
    exact = 0
    for sub, sat in draws:
        rep = classify(Equilibrium(0.0, 0.0, Regime.SUB), sub, sat)
        got = sorted(v.real for v in rep.eigenvalues)
        exact += got == sorted([-1.0, sub.B - sub.e]) and all(v.imag == 0 for v in rep.eigenvalues)

    worst_final = 0.0
    n_traj = 0
    for name in ("cond1", "cond2"):
        sub, sat = nondimensionalize(shipped_params(name))
        assert any(c.holds for c in dulac_certificate(sub, sat))
        for start in _grid_starts():
            traj = integrate(start, sub, sat, tol["origin_time"], tol["integrator_tol"])
            worst_final = max(worst_final, float(np.hypot(*traj.final)))
            n_traj += 1

    growth_min = math.inf
    unstable = [nondimensionalize(shipped_params("endemic"))[0]]
    while len(unstable) < COUNTS["unstable_draws"]:
        m = 5 * _open_unit(rng)
        B = 10 * _open_unit(rng)
        e = B - rng.uniform(0.25, B) if B > 0.25 else None
        if e is None or e <= 0:
            continue
        q = min(e, 5) * _open_unit(rng) * 0.999
        unstable.append(ScaledSub(m, B, e, q))
    for sub in unstable:
        traj = integrate((1e-4, 0.0), sub, None, tol["growth_time"], tol["integrator_tol"])
        growth = float(np.max(np.hypot(traj.states[:, 0], traj.states[:, 1]))) / 1e-4
        growth_min = min(growth_min, growth)
    passed = (
        exact == len(draws)
        and worst_final < tol["origin_radius"]
        and growth_min >= tol["growth_factor"]
    )
    return CriterionResult(
        6,
        "disease-free stability",
        passed,
        {
            "exact_eigenvalues": f"{exact}/{len(draws)}",
            "trajectories": n_traj,
            "max_final_norm": worst_final,
            "unstable_sets": len(unstable),
            "min_growth_factor": growth_min,
        },
    )


def degenerate_draws(rng, count: int) -> list[ScaledSub]:
    """B = e sets, half with each sign of the center-manifold coefficient."""
    out = {True: [], False: []}
    while len(out[True]) + len(out[False]) < count:
        m = 5 * _open_unit(rng)
        B = 10 * _open_unit(rng)
        q = min(B, 5) * rng.random()
        if q == 0.0 or q >= B:
            continue
        params = ScaledSub(m, B, B, q)
        c = center_manifold_coefficient(params)
        if abs(c) < 1e-9:
            continue
        bucket = out[c > 0]
        if len(bucket) < count // 2:
            bucket.append(params)
    return out[False] + out[True]


def simulate_center_direction(params: ScaledSub, delta: float = 1e-3) -> str:
    """'attracting', 'repelling' or 'undecided' from a run started on the center direction."""
    c = center_manifold_coefficient(params)
    t_end = min(5.0 / (abs(c) * delta), 1e6)
    traj = integrate((delta, params.q * delta), params, None, t_end, 1e-10)
    x_end = float(traj.final[0])
    if x_end < 0.5 * delta:
        return "attracting"
    if x_end > 2 * delta:
        return "repelling"
    return "undecided"


def criterion_degenerate_origin(tol, params_list) -> CriterionResult:
    hits = printed_hits = bm1_hits = 0
    bm1_vs_c = 0
    for params in params_list:
        rep = analyze_disease_free_degenerate(params)
        outcome = simulate_center_direction(params)
        c = rep.diagnostics["center_coefficient"]
        predicted = "attracting" if c < 0 else "repelling"
        hits += outcome == predicted
        printed = printed_center_coefficient(params)
        printed_hits += outcome == ("attracting" if printed < 0 else "repelling")
        bm1 = "attracting" if params.B * params.m - 1 < 0 else "repelling"
        bm1_hits += outcome == bm1
        bm1_vs_c += bm1 != predicted
    n = len(params_list)
    rate = hits / n
    return CriterionResult(
        7,
        "degenerate disease-free point",
        rate >= tol["degenerate_hit_rate"],
        {"draws": n, "hit_rate": rate, "required": tol["degenerate_hit_rate"]},
        {
            "printed_2(Bm-1)-q_hit_rate": printed_hits / n,
            "Bm-1_criterion_hit_rate": bm1_hits / n,
            "Bm-1_vs_coefficient_disagreements": bm1_vs_c,
        },
    )


def criterion_double_point(tol, folds) -> CriterionResult:
    worst_identity = worst_eig = 0.0
    printed_d01_matches = 0
    labels = {}
    for params in folds:
        x, y = fold_point(params)
        eq = Equilibrium(x, y, Regime.SUB, Multiplicity.DOUBLE)
        rep = analyze_double_point(eq, params)
        nf = rep.normal_form
        worst_identity = max(worst_identity, abs(-nf.a10 - params.q * nf.a01))
        lin = transformed_linearization(nf)
        rescale = -(nf.a10 + 1)
        eig = sorted(np.linalg.eigvals(lin).real / rescale)
        expected = sorted([0.0, rep.trace])
        worst_eig = max(worst_eig, max(abs(a - b) for a, b in zip(eig, expected)))
        printed = rep.diagnostics.get("printed_d01_rate")
        if printed is not None and abs(printed - lin[1, 1]) < 1e-8 * max(1, abs(lin[1, 1])):
            printed_d01_matches += 1
        labels[rep.label.value] = labels.get(rep.label.value, 0) + 1
    passed = worst_identity < tol["degeneracy_identity"] and worst_eig < tol["transform_eigen"]
    return CriterionResult(
        8,
        "double-point normal form",
        passed,
        {"folds": len(folds), "max_degeneracy_identity": worst_identity, "max_transformed_eig_err": worst_eig},
        {"printed_d01_matches_transformed_rate": f"{printed_d01_matches}/{len(folds)}", "labels": labels},
    )


def criterion_dulac(tol, rng, count: int) -> CriterionResult:
    certified = []
    while len(certified) < count:
        (sub, sat), = random_draws(rng, 1)
        certs = dulac_certificate(sub, sat)
        if any(c.holds for c in certs):
            certified.append((sub, [c.condition_id for c in certs if c.holds]))
    negative = 0
    failures_by_cond = {"Cond1": 0, "Cond2": 0}
    worst = -math.inf
    for sub, conds in certified:
        top = max(sub.B, 1.0)
        gmax = dulac_grid_max(sub, top, top, 50)
        worst = max(worst, gmax)
        if gmax < 0:
            negative += 1
        else:
            for c in conds:
                failures_by_cond[c] += 1
    return CriterionResult(
        9,
        "Dulac negativity",
        negative == len(certified),
        {"certified_draws": len(certified), "negative_everywhere": negative, "max_divergence": worst},
        {"nonnegative_by_condition": failures_by_cond},
    )


def criterion_integrator(tol) -> CriterionResult:
    t_end = 50.0
    worst_conv = 0.0
    worst_event = 0.0
    worst_neg = math.inf
    n_events = 0
    base = tol["integrator_tol"]
    for name in SHIPPED:
        sub, sat = nondimensionalize(shipped_params(name))
        start = INTEGRATOR_STARTS[name]
        coarse = integrate(start, sub, sat, t_end, base)
        fine = integrate(start, sub, sat, t_end, base / 2)
        worst_conv = max(worst_conv, float(np.max(np.abs(coarse.final - fine.final))) / base)
        worst_neg = min(worst_neg, float(coarse.states.min()), float(fine.states.min()))
        for ev in coarse.events:
            t0, h, y0, y1, f0, f1 = ev.segment
            t_oracle = brentq(
                lambda t: hermite(t0, h, y0, y1, f0, f1, t)[0] - sub.x0, t0, t0 + h, xtol=1e-15, rtol=1e-15
            )
            worst_event = max(worst_event, abs(ev.time - t_oracle))
            n_events += 1
    passed = worst_conv < 10 and worst_event < tol["event_time"] and worst_neg >= -tol["negativity"] and n_events > 0
    return CriterionResult(
        10,
        "integrator",
        passed,
        {
            "sets": len(SHIPPED),
            "max_halving_change_over_tol": worst_conv,
            "events": n_events,
            "max_event_time_err": worst_event,
            "min_component": worst_neg,
        },
    )


def run_all(overrides: dict | None = None, only: set[int] | None = None, seed: int = SEED) -> list[CriterionResult]:
    tol = dict(TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in tol:
            raise KeyError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
        tol[key] = float(value)
    rng = np.random.default_rng(seed)
    draws = random_draws(rng, COUNTS["draws"])
    folds = fold_draws(rng, COUNTS["fold_draws"], min_gap=2 * tol["fold_offset"])

    def want(n):
        return only is None or n in only

    results = []
    if want(1):
        results.append(criterion_residuals(tol, draws))
    if want(2):
        results.append(criterion_root_oracles(tol, draws))
    if want(3):
        results.append(criterion_case_coverage(tol, np.random.default_rng(seed + 3), COUNTS["case_draws"]))
    if want(4):
        results.append(criterion_fold(tol, folds))
    if want(5):
        results.append(criterion_sotomayor(tol, folds))
    if want(6):
        results.append(criterion_disease_free(tol, draws[:1000], np.random.default_rng(seed + 6)))
    if want(7):
        results.append(
            criterion_degenerate_origin(tol, degenerate_draws(np.random.default_rng(seed + 7), COUNTS["degenerate_draws"]))
        )
    if want(8):
        results.append(criterion_double_point(tol, folds))
    if want(9):
        results.append(criterion_dulac(tol, np.random.default_rng(seed + 9), COUNTS["dulac_draws"]))
    if want(10):
        results.append(criterion_integrator(tol))
    return results
