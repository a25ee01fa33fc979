"""Adaptive Dormand-Prince integration of the switched planar system.

The Sub field applies on x <= x0 and the Sat field on x > x0.  Crossings of
the switching line are located by bisection on the cubic Hermite interpolant
of the accepted step and the step is cut at the crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Regime, ScaledSat, ScaledSub, regime_of, rhs_sat, rhs_sub

EVENT_TIME_TOL = 1e-12
TRANSVERSALITY_TOL = 1e-10
NEGATIVITY_TOL = 1e-9

# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


class IntegrationError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time!r})")
        self.time = time


class SwitchingError(IntegrationError):
    """The flow does not cross x = x0 transversally (grazing or sliding)."""


@dataclass
class Event:
    time: float
    direction: int  # +1 Sub -> Sat, -1 Sat -> Sub
    state: tuple[float, float]
    segment: tuple  # full accepted step (t0, h, y0, y1, f0, f1) the crossing was found in


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    regime_flags: list[Regime]
    events: list[Event]
    x0: float
    backward: bool = False
    segments: list[tuple] = field(default_factory=list, repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def dense(self, t: float) -> np.ndarray:
        """State at time ``t`` from the Hermite interpolant of the covering step."""
        starts = [seg[0] for seg in self.segments]
        i = int(np.searchsorted(starts, t, side="right")) - 1
        i = min(max(i, 0), len(self.segments) - 1)
        t0, h, y0, y1, f0, f1 = self.segments[i]
        return np.array(hermite(t0, h, y0, y1, f0, f1, t))


def hermite(t0, h, y0, y1, f0, f1, t):
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return tuple(h00 * a + h10 * h * da + h01 * b + h11 * h * db for a, b, da, db in zip(y0, y1, f0, f1))


def _dp_step(fun, y, f0, h):
    ks = [f0]
    for i in range(1, 7):
        a = _A[i]
        yi = (
            y[0] + h * sum(a[j] * ks[j][0] for j in range(i)),
            y[1] + h * sum(a[j] * ks[j][1] for j in range(i)),
        )
        ks.append(fun(yi))
    # FSAL: the last stage is evaluated at the 5th-order solution
    y_new = (
        y[0] + h * sum(b * k[0] for b, k in zip(_B5, ks)),
        y[1] + h * sum(b * k[1] for b, k in zip(_B5, ks)),
    )
    err = (
        h * sum(e * k[0] for e, k in zip(_E, ks)),
        h * sum(e * k[1] for e, k in zip(_E, ks)),
    )
    return y_new, err, ks[6]


def integrate(
    start,
    sub: ScaledSub,
    sat: ScaledSat | None = None,
    t_end: float = 100.0,
    tol: float = 1e-8,
    *,
    backward: bool = False,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate from ``start`` over [0, t_end].

    With ``sat=None`` the Sub field is used everywhere.  ``backward=True``
    integrates the time-reversed field; times then count elapsed reverse time.
    Local error per step is held below ``tol * (1 + |y|)`` componentwise.
    """
    if not (1e-12 <= tol <= 1e-3):
        raise ValueError(f"tol must lie in [1e-12, 1e-3], got {tol}")
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    x, y = (float(v) for v in start)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite start {start!r}")
    if not backward and (x < 0 or y < 0):
        raise ValueError(f"start {start!r} lies outside the closed first quadrant")

    x0 = sub.x0 if sat is not None else math.inf
    sign = -1.0 if backward else 1.0

    def sub_field(s):
        dx, dy = rhs_sub(s[0], s[1], sub)
        return sign * dx, sign * dy

    def sat_field(s):
        dx, dy = rhs_sat(s[0], s[1], sat)
        return sign * dx, sign * dy

    fields = {Regime.SUB: sub_field, Regime.SAT: sat_field if sat is not None else None}

    regime = Regime.SUB if x <= x0 else Regime.SAT
    fun = fields[regime]
    t = 0.0
    state = (x, y)
    f0 = fun(state)
    times = [t]
    states = [state]
    events: list[Event] = []
    segments: list[tuple] = []

    scale0 = max(1.0, abs(x), abs(y))
    fnorm = max(abs(f0[0]), abs(f0[1]), 1e-12)
    h = min(t_end, 0.01 * scale0 / fnorm, 0.1)
    steps = 0
    while t < t_end:
        steps += 1
        if steps > max_steps:
            raise IntegrationError("step budget exhausted", t)
        h = min(h, t_end - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            if t_end - t <= 1e-14 * max(1.0, abs(t)):
                break
            raise IntegrationError("step size underflow", t)
        y_new, err, f1 = _dp_step(fun, state, f0, h)
        errnorm = max(
            abs(err[i]) / (tol * (1.0 + max(abs(state[i]), abs(y_new[i])))) for i in range(2)
        )
        if not math.isfinite(errnorm):
            h *= 0.1
            continue
        if errnorm > 1.0 or (not backward and min(y_new) < -NEGATIVITY_TOL):
            h *= max(0.1, 0.9 * errnorm ** -0.2) if errnorm > 1.0 else 0.5
            continue

        crossed = None
        if fields[Regime.SAT] is not None:
            if regime is Regime.SUB and y_new[0] > x0:
                crossed = +1
            elif regime is Regime.SAT and y_new[0] <= x0:
                crossed = -1

        if crossed is None:
            segments.append((t, h, state, y_new, f0, f1))
            t += h
            state = y_new
            f0 = f1
            times.append(t)
            states.append(state)
        else:
            full = (t, h, state, y_new, f0, f1)
            s_hit = _locate(full, x0, crossed)
            hit = hermite(t, h, state, y_new, f0, f1, t + s_hit)
            new_regime = Regime.SAT if crossed > 0 else Regime.SUB
            new_fun = fields[new_regime]
            dx_dest = new_fun(hit)[0]
            dx_orig = fun(hit)[0]
            if dx_dest * crossed <= TRANSVERSALITY_TOL or dx_orig * crossed <= TRANSVERSALITY_TOL:
                raise SwitchingError(
                    f"non-transversal crossing of x = x0 (dx/dt = {dx_orig:.3g} before, {dx_dest:.3g} after)",
                    t + s_hit,
                )
            segments.append((t, s_hit, state, hit, f0, fun(hit)))
            t += s_hit
            state = hit
            events.append(Event(t, crossed, hit, full))
            times.append(t)
            states.append(state)
            regime = new_regime
            fun = new_fun
            f0 = fun(state)
            continue
        factor = 5.0 if errnorm == 0 else min(5.0, max(0.2, 0.9 * errnorm ** -0.2))
        h *= factor

    arr = np.array(states)
    flags = [regime_of(s[0], x0) for s in states]
    return Trajectory(np.array(times), arr, flags, events, x0, backward, segments)


def _locate(segment, x0: float, direction: int) -> float:
    """Offset within the step where x first crosses x0, returned on the far side."""
    t0, h, y0, y1, f0, f1 = segment

    def crossed(s):
        xv = hermite(t0, h, y0, y1, f0, f1, t0 + s)[0]
        return xv > x0 if direction > 0 else xv <= x0

    lo, hi = 0.0, h
    while hi - lo > EVENT_TIME_TOL * max(1.0, abs(t0)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if crossed(mid):
            hi = mid
        else:
            lo = mid
    return hi
