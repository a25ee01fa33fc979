"""Parameters, scaling and vector fields of the SIRS model with capped treatment.

The three-compartment model

    S' = A - d S - lam I (1 + nu I) S + theta R
    I' = lam I (1 + nu I) S - (d + mu) I - T(I)
    R' = mu I - d R + T(I) - theta R

has treatment T(I) = r I below the capacity threshold I0 and T(I) = n above it.
Total population relaxes to A/d, so the analysis works on the limiting planar
system in (I, R) with S = A/d - I - R.  With k = d + theta and the substitution
I = k x / lam, R = k y / lam, t = tau / k, the two treatment regimes become

    Sub (x <= x0):  x' = x (1 + m x)(B - x - y) - e x,      y' = q x - y
    Sat (x >  x0):  x' = x (1 + m x)(B - x - y) - g x - f,  y' = p x - y + f
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ParameterError(ValueError):
    """Invalid model parameters. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Regime(str, enum.Enum):
    SUB = "Sub"
    SAT = "Sat"


def _check(name: str, value, *, positive: bool = False, nonneg: bool = False) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, f"expected a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(name, "must be finite")
    if positive and not value > 0:
        raise ParameterError(name, f"must be > 0, got {value}")
    if nonneg and not value >= 0:
        raise ParameterError(name, f"must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class RawParams:
    """Epidemiological constants of the three-compartment model."""

    A: float
    d: float
    lam: float
    nu: float
    mu: float
    theta: float
    r: float
    n: float
    I0: float

    def __post_init__(self):
        for name in ("A", "d", "lam", "mu", "I0"):
            object.__setattr__(self, name, _check(name, getattr(self, name), positive=True))
        for name in ("nu", "theta", "r", "n"):
            object.__setattr__(self, name, _check(name, getattr(self, name), nonneg=True))

    @classmethod
    def from_mapping(cls, data: dict) -> "RawParams":
        # the file format spells the transmission constant "lambda"
        names = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            name = "lam" if key == "lambda" else key
            if name not in names or key == "lam":
                raise ParameterError(key, "unknown parameter")
            kwargs[name] = value
        missing = sorted(names - kwargs.keys())
        if missing:
            name = "lambda" if missing[0] == "lam" else missing[0]
            raise ParameterError(name, "missing")
        return cls(**kwargs)

    def to_mapping(self) -> dict:
        return {("lambda" if f.name == "lam" else f.name): getattr(self, f.name) for f in fields(self)}

    def replace(self, **changes) -> "RawParams":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return RawParams(**data)


def load_params(path) -> RawParams:
    """Read a flat TOML document whose keys are exactly the RawParams fields."""
    text = Path(path).read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError("<file>", f"cannot parse {path}: {exc}") from None
    for key, value in data.items():
        if isinstance(value, dict):
            raise ParameterError(key, "nested tables are not allowed")
    return RawParams.from_mapping(data)


@dataclass(frozen=True)
class ScaledSub:
    """Scaled parameters of the proportional-treatment regime."""

    m: float
    B: float
    e: float
    q: float
    x0: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "m", _check("m", self.m, nonneg=True))
        object.__setattr__(self, "B", _check("B", self.B, positive=True))
        object.__setattr__(self, "e", _check("e", self.e, positive=True))
        object.__setattr__(self, "q", _check("q", self.q, nonneg=True))
        x0 = float(self.x0)
        if not x0 > 0 or math.isnan(x0):
            raise ParameterError("x0", f"must be > 0, got {x0}")
        object.__setattr__(self, "x0", x0)

    @property
    def realizable(self) -> bool:
        """True when some RawParams maps onto these values (0 < e - q <= 1)."""
        return 0 < self.e - self.q <= 1


@dataclass(frozen=True)
class ScaledSat:
    """Scaled parameters of the saturated-treatment regime."""

    m: float
    B: float
    g: float
    p: float
    f: float
    x0: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "m", _check("m", self.m, nonneg=True))
        object.__setattr__(self, "B", _check("B", self.B, positive=True))
        object.__setattr__(self, "g", _check("g", self.g, positive=True))
        object.__setattr__(self, "p", _check("p", self.p, nonneg=True))
        object.__setattr__(self, "f", _check("f", self.f, nonneg=True))
        x0 = float(self.x0)
        if not x0 > 0 or math.isnan(x0):
            raise ParameterError("x0", f"must be > 0, got {x0}")
        object.__setattr__(self, "x0", x0)

    @property
    def realizable(self) -> bool:
        return 0 < self.g - self.p <= 1


def nondimensionalize(raw: RawParams) -> tuple[ScaledSub, ScaledSat]:
    k = raw.d + raw.theta
    m = raw.nu * k / raw.lam
    B = raw.lam * raw.A / (raw.d * k)
    x0 = raw.lam * raw.I0 / k
    sub = ScaledSub(m=m, B=B, e=(raw.d + raw.mu + raw.r) / k, q=(raw.mu + raw.r) / k, x0=x0)
    sat = ScaledSat(m=m, B=B, g=(raw.d + raw.mu) / k, p=raw.mu / k, f=raw.n * raw.lam / k**2, x0=x0)
    return sub, sat


def regime_of(x: float, x0: float) -> Regime:
    # closed on the left: the switching line itself belongs to the Sub field
    return Regime.SUB if x <= x0 + 1e-12 else Regime.SAT


def _incidence(x, y, m, B):
    return x * (1.0 + m * x) * (B - x - y)


def rhs_sub(x: float, y: float, p: ScaledSub) -> tuple[float, float]:
    return _incidence(x, y, p.m, p.B) - p.e * x, p.q * x - y


def rhs_sat(x: float, y: float, p: ScaledSat) -> tuple[float, float]:
    return _incidence(x, y, p.m, p.B) - p.g * x - p.f, p.p * x - y + p.f


def rhs(state, params: ScaledSub | ScaledSat, regime: Regime | None = None) -> np.ndarray:
    """Vector field of one regime at ``state``; the regime follows the params type by default."""
    x, y = (float(v) for v in state)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite state {state!r}")
    regime = Regime(regime) if regime is not None else _regime_for(params)
    if regime is Regime.SUB:
        return np.array(rhs_sub(x, y, params))
    return np.array(rhs_sat(x, y, params))


def _regime_for(params) -> Regime:
    return Regime.SUB if isinstance(params, ScaledSub) else Regime.SAT


def _linear_loss(params, regime: Regime) -> tuple[float, float]:
    """Coefficients (loss rate of x, inflow rate of y) of the chosen regime."""
    if regime is Regime.SUB:
        return params.e, params.q
    return params.g, params.p


def jacobian(state, params: ScaledSub | ScaledSat, regime: Regime | None = None) -> np.ndarray:
    x, y = (float(v) for v in state)
    regime = Regime(regime) if regime is not None else _regime_for(params)
    m, B = params.m, params.B
    loss, inflow = _linear_loss(params, regime)
    return np.array(
        [
            [B - 2 * x - y + 2 * B * m * x - 3 * m * x * x - 2 * m * x * y - loss, -x - m * x * x],
            [inflow, -1.0],
        ]
    )


def second_partials(state, params: ScaledSub | ScaledSat) -> tuple[float, float, float]:
    """(F1_xx, F1_xy, F1_yy) of the first component; identical in both regimes."""
    x, y = (float(v) for v in state)
    m, B = params.m, params.B
    return -2.0 + 2 * B * m - 6 * m * x - 2 * m * y, -1.0 - 2 * m * x, 0.0


def finite_difference_jacobian(state, params, regime=None, step: float = 1e-6) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    jac = np.empty((2, 2))
    for j in range(2):
        dx = np.zeros(2)
        dx[j] = step
        jac[:, j] = (rhs(state + dx, params, regime) - rhs(state - dx, params, regime)) / (2 * step)
    return jac


def treatment(I: float, raw: RawParams) -> float:
    return raw.r * I if I <= raw.I0 else raw.n


def rhs_full(S: float, I: float, R: float, raw: RawParams) -> tuple[float, float, float]:
    """Unreduced three-compartment field."""
    infection = raw.lam * I * (1 + raw.nu * I) * S
    T = treatment(I, raw)
    return (
        raw.A - raw.d * S - infection + raw.theta * R,
        infection - (raw.d + raw.mu) * I - T,
        raw.mu * I - raw.d * R + T - raw.theta * R,
    )


def rhs_limiting(I: float, R: float, raw: RawParams) -> tuple[float, float]:
    """(I, R) field of the limiting system with S = A/d - I - R."""
    _, dI, dR = rhs_full(raw.A / raw.d - I - R, I, R, raw)
    return dI, dR


def to_scaled_state(I: float, R: float, raw: RawParams) -> tuple[float, float]:
    k = raw.d + raw.theta
    return raw.lam * I / k, raw.lam * R / k


def to_raw_state(x: float, y: float, raw: RawParams) -> tuple[float, float]:
    k = raw.d + raw.theta
    return k * x / raw.lam, k * y / raw.lam


def scaled_time_factor(raw: RawParams) -> float:
    """Scaled time equals raw time multiplied by this factor (k = d + theta)."""
    return raw.d + raw.theta
