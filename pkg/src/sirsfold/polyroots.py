"""Real roots of low-degree polynomials via companion-matrix eigenvalues."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOUBLE_ROOT_RTOL = 1e-7
IMAG_RTOL = 1e-9


@dataclass(frozen=True)
class Root:
    x: float
    double: bool = False


def polyval(coeffs, x: float) -> float:
    """Horner evaluation, highest degree first."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def polyder(coeffs) -> list[float]:
    deg = len(coeffs) - 1
    return [c * (deg - i) for i, c in enumerate(coeffs[:-1])]


def companion_eigenvalues(coeffs) -> np.ndarray:
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if coeffs.size <= 1:
        return np.empty(0, dtype=complex)
    monic = coeffs[1:] / coeffs[0]
    deg = monic.size
    comp = np.zeros((deg, deg))
    comp[0, :] = -monic
    comp[1:, :-1] = np.eye(deg - 1)
    return np.linalg.eigvals(comp)


def _newton(coeffs, x: float, iters: int = 8) -> float:
    dcoeffs = polyder(coeffs)
    for _ in range(iters):
        d = polyval(dcoeffs, x)
        if d == 0.0:
            break
        step = polyval(coeffs, x) / d
        x_new = x - step
        if not np.isfinite(x_new) or abs(polyval(coeffs, x_new)) > abs(polyval(coeffs, x)):
            break
        x = x_new
    return x


def real_roots(coeffs) -> list[Root]:
    """Real roots (ascending) with near-coincident pairs merged into double roots.

    Simple roots are Newton-polished on the polynomial, double roots on its
    derivative, where they are simple.
    """
    coeffs = [float(c) for c in np.trim_zeros(np.asarray(coeffs, dtype=float), "f")]
    eig = companion_eigenvalues(coeffs)
    used = [False] * eig.size
    roots: list[Root] = []
    for i in range(eig.size):
        if used[i]:
            continue
        scale = max(1.0, abs(eig[i]))
        partner = None
        for j in range(i + 1, eig.size):
            if not used[j] and abs(eig[i] - eig[j]) < DOUBLE_ROOT_RTOL * scale:
                partner = j
                break
        if partner is not None:
            used[i] = used[partner] = True
            x = 0.5 * (eig[i] + eig[partner]).real
            roots.append(Root(float(_newton(polyder(coeffs), float(x))), double=True))
        elif abs(eig[i].imag) <= IMAG_RTOL * scale:
            used[i] = True
            roots.append(Root(float(_newton(coeffs, float(eig[i].real)))))
    roots.sort(key=lambda r: r.x)
    return roots
