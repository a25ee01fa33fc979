"""Saddle-node point in the loss rate e, Sotomayor checks and parameter scans."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .equilibria import Equilibrium, Multiplicity, catalog, solve_sub_endemic
from .model import RawParams, Regime, ScaledSub, jacobian, nondimensionalize, rhs_sub, second_partials
from .stability import Label, classify

SCAN_PARAMETERS = ("r", "A", "nu", "n", "I0")


class FoldError(ValueError):
    pass


def e_sn(params: ScaledSub) -> float:
    m, B, q = params.m, params.B, params.q
    if not (m > 0 and m > (1 + q) / B):
        raise FoldError(
            f"no fold at positive x: need m > (1+q)/B = {(1 + q) / B:.6g}, got m = {m:.6g}; "
            "the double root (Bm-q-1)/(2m(1+q)) would be non-positive"
        )
    return B + (1 + q - B * m) ** 2 / (4 * m * (1 + q))


def fold_point(params: ScaledSub) -> tuple[float, float]:
    x = (params.B * params.m - params.q - 1) / (2 * params.m * (1 + params.q))
    return x, params.q * x


def at_fold(params: ScaledSub) -> ScaledSub:
    return replace(params, e=e_sn(params))


@dataclass
class SotomayorReport:
    eStar: float
    xStar: float
    yStar: float
    v: np.ndarray
    w: np.ndarray
    wF_e: float
    wD2F: float
    verdict: bool
    checks: dict = field(default_factory=dict)


def _null_vector(mat: np.ndarray) -> tuple[np.ndarray, float]:
    _, s, vt = np.linalg.svd(mat)
    return vt[-1], float(s[-1] / max(1.0, s[0]))


def directional_second_derivative(state, params: ScaledSub, v) -> np.ndarray:
    fxx, fxy, fyy = second_partials(state, params)
    return np.array([fxx * v[0] ** 2 + 2 * fxy * v[0] * v[1] + fyy * v[1] ** 2, 0.0])


def fd_directional_second_derivative(state, params: ScaledSub, v, step: float = 1e-4) -> np.ndarray:
    x, y = state
    plus = np.array(rhs_sub(x + step * v[0], y + step * v[1], params))
    mid = np.array(rhs_sub(x, y, params))
    minus = np.array(rhs_sub(x - step * v[0], y - step * v[1], params))
    return (plus - 2 * mid + minus) / step**2


def sotomayor(params: ScaledSub) -> SotomayorReport:
    """Transversality data of the fold in e; ``params.e`` must sit at e_SN."""
    eStar = e_sn(params)
    if abs(params.e - eStar) > 1e-10 * max(1.0, eStar):
        raise FoldError(f"e = {params.e!r} is not at the fold value {eStar!r}")
    x, y = fold_point(params)
    jac = jacobian((x, y), params, Regime.SUB)
    q = params.q

    v = np.array([1.0, q])
    w_num, rel_sing = _null_vector(jac.T)
    if rel_sing > 1e-6:
        raise FoldError(f"Jacobian at the fold has no zero eigenvalue (relative singular value {rel_sing:.3g})")
    if q != 0.0:
        w = w_num * (q / w_num[0])
    else:
        w = w_num / np.linalg.norm(w_num)

    F_e = np.array([-x, 0.0])
    h = 1e-6
    F_e_fd = (np.array(rhs_sub(x, y, replace(params, e=params.e + h))) - np.array(rhs_sub(x, y, replace(params, e=params.e - h)))) / (2 * h)
    D2 = directional_second_derivative((x, y), params, v)
    D2_fd = fd_directional_second_derivative((x, y), params, v)

    wF_e = float(w @ F_e)
    wD2F = float(w @ D2)

    w_printed = np.array([q, x + params.m * x * x])
    v_unit = v / np.linalg.norm(v)
    w_unit = w / np.linalg.norm(w) if np.linalg.norm(w) > 0 else w
    cosine = float(abs(w_unit @ (w_printed / np.linalg.norm(w_printed)))) if np.linalg.norm(w_printed) > 0 else float("nan")
    m, B = params.m, params.B
    printed_D2 = (2 * B * m - 3 * q - 2 - q * q) / (1 + q)
    printed_wD2F = (2 * B * m * q - 3 * q * q - 2 * q - q**3) / (1 + q)
    checks = {
        "Jv_residual": float(np.linalg.norm(jac @ v_unit)),
        "JTw_residual": float(np.linalg.norm(jac.T @ w_unit)),
        "F_e_fd_error": float(np.max(np.abs(F_e - F_e_fd))),
        "D2F_fd_error": float(np.max(np.abs(D2 - D2_fd))),
        "wF_e_expected": -q * x,
        "printed_D2F_first": printed_D2,
        "printed_wD2F": printed_wD2F,
        "wD2F_relative_deviation": abs(wD2F - printed_wD2F) / max(abs(printed_wD2F), 1e-300),
        "w_printed": w_printed.tolist(),
        "w_printed_colinear": bool(abs(cosine - 1) < 1e-6),
        "w_second_over_first": float(w[1] / w[0]) if w[0] != 0 else float("nan"),
    }
    verdict = abs(wF_e) > 1e-8 and abs(wD2F) > 1e-8
    return SotomayorReport(eStar, x, y, v, w, wF_e, wD2F, verdict, checks)


def branch_gap(params: ScaledSub, e: float) -> float:
    roots = solve_sub_endemic(replace(params, e=e))
    if len(roots) != 2:
        raise FoldError(f"expected two endemic roots at e = {e!r}, found {len(roots)}")
    return roots[1][0] - roots[0][0]


def gap_scaling_exponent(params: ScaledSub, exponents=(3, 4, 5, 6)) -> float:
    """Slope of log(gap) against log(e_SN - e) at e = e_SN - 10^-k."""
    eStar = e_sn(params)
    d = np.array([10.0 ** -k for k in exponents])
    gaps = np.array([branch_gap(params, eStar - di) for di in d])
    slope, _ = np.polyfit(np.log(d), np.log(gaps), 1)
    return float(slope)


@dataclass
class ScanSample:
    value: float
    equilibria: list[Equilibrium]
    labels: list[Label]

    def count(self, regime: Regime = Regime.SUB, admissible_only: bool = False) -> int:
        """Endemic count in ``regime``; a double root counts once."""
        return sum(
            1
            for eq in self.equilibria
            if eq.regime is regime and not eq.is_disease_free and (eq.admissible or not admissible_only)
        )


@dataclass
class ScanResult:
    parameter_name: str
    samples: list[ScanSample]


def _scan_sample(raw: RawParams, parameter: str, value: float) -> ScanSample:
    sub, sat = nondimensionalize(raw.replace(**{parameter: value}))
    cat = catalog(sub, sat)
    eqs = cat.all
    labels = [classify(eq, sub, sat).label for eq in eqs]
    return ScanSample(value, eqs, labels)


def scan(raw: RawParams, parameter: str, lo: float, hi: float, steps: int, workers: int = 1) -> ScanResult:
    if parameter == "lambda":
        raise ValueError("scan parameters are r, A, nu, n, I0")
    if parameter not in SCAN_PARAMETERS:
        raise ValueError(f"unknown scan parameter {parameter!r}; choose from {', '.join(SCAN_PARAMETERS)}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
        raise ValueError(f"scan range must be finite and non-empty, got [{lo}, {hi}]")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    values = np.linspace(min(lo, hi), max(lo, hi), steps)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            samples = list(pool.map(lambda v: _scan_sample(raw, parameter, float(v)), values))
    else:
        samples = [_scan_sample(raw, parameter, float(v)) for v in values]
    return ScanResult(parameter, samples)


def double_count(sample: ScanSample) -> int:
    return sum(1 for eq in sample.equilibria if eq.multiplicity is Multiplicity.DOUBLE)
