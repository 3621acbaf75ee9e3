"""Shared domain types and the scalar helpers used by every closed form."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Sequence


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class MarketParams:
    """Constant Black-Scholes coefficients.

    ``r`` and ``q`` are continuously compounded rates per year (negative
    values allowed); ``sigma`` is the log-volatility per square-root year.
    """

    r: float
    q: float
    sigma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _finite("r", self.r))
        object.__setattr__(self, "q", _finite("q", self.q))
        sigma = _finite("sigma", self.sigma)
        if sigma <= 0.0:
            raise ValueError(f"sigma must be > 0, got {sigma!r}")
        object.__setattr__(self, "sigma", sigma)

    @property
    def log_drift(self) -> float:
        """Risk-neutral drift of ``ln X``: r - q - sigma^2/2."""
        return self.r - self.q - 0.5 * self.sigma**2


@dataclass(frozen=True)
class Horizon:
    t: float
    T: float

    def __post_init__(self) -> None:
        t = _finite("t", self.t)
        T = _finite("T", self.T)
        if not 0.0 <= t <= T:
            raise ValueError(f"horizon needs 0 <= t <= T, got t={t!r}, T={T!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "T", T)

    @property
    def tau(self) -> float:
        return self.T - self.t


@dataclass(frozen=True)
class MonitoringSchedule:
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        times = tuple(_finite("schedule time", v) for v in self.times)
        if not times:
            raise ValueError("schedule must contain at least one time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"schedule times must be strictly increasing, got {times!r}")
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def expiry(self) -> float:
        return self.times[-1]

    @classmethod
    def equally_spaced(cls, n: int, T: float, start: float = 0.0) -> "MonitoringSchedule":
        if n < 2:
            raise ValueError(f"need at least 2 monitoring times, got {n}")
        step = (T - start) / (n - 1)
        times = [start + i * step for i in range(n - 1)] + [float(T)]
        return cls(tuple(times))


@dataclass(frozen=True)
class FixedObservations:
    fixings: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        fixings = tuple(_finite("fixing", v) for v in self.fixings)
        if any(v <= 0.0 for v in fixings):
            raise ValueError(f"fixings must be > 0, got {fixings!r}")
        object.__setattr__(self, "fixings", fixings)

    def __len__(self) -> int:
        return len(self.fixings)

    @property
    def log_sum(self) -> float:
        return math.fsum(math.log(v) for v in self.fixings)


class Sign(IntEnum):
    """Selects the upper (+1) or lower (-1) branch of a binary condition."""

    UP = 1
    DOWN = -1

    @classmethod
    def parse(cls, value: object) -> "Sign":
        if isinstance(value, Sign):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("+", "up", "+1", "1"):
                return cls.UP
            if key in ("-", "down", "-1"):
                return cls.DOWN
        elif isinstance(value, numbers.Real) and not isinstance(value, bool):
            if value == 1:
                return cls.UP
            if value == -1:
                return cls.DOWN
        raise ValueError(f"sign must be one of +, -, up, down, 1, -1; got {value!r}")

    def __neg__(self) -> "Sign":  # type: ignore[override]
        return Sign(-int(self))


@dataclass(frozen=True)
class PriceResult:
    """A price plus the intermediate scalars that produced it.

    ``stderr`` is only set by the Monte Carlo oracle.
    """

    value: float
    diagnostics: Mapping[str, float] = field(default_factory=dict)
    stderr: float | None = None

    def __post_init__(self) -> None:
        value = float(self.value)
        if not math.isfinite(value):
            raise ArithmeticError(f"price is not finite: {value!r}")
        object.__setattr__(self, "value", value)
        if self.stderr is not None and not self.stderr >= 0.0:
            raise ValueError(f"stderr must be >= 0, got {self.stderr!r}")

    def __float__(self) -> float:
        return self.value


def mu(params: MarketParams, alpha: float) -> float:
    """Growth exponent of the alpha-power payoff.

    ``e^{mu (T-t)} x^alpha`` is the Black-Scholes value of a claim paying
    ``X_T^alpha``; mu(0) = -r and mu(1) = -q.
    """
    r, q, s2 = params.r, params.q, params.sigma**2
    return (alpha - 1.0) * r - alpha * q + 0.5 * s2 * (alpha * alpha - alpha)


def d_arg(x_over_xi: float, params: MarketParams, alpha: float, tau: float) -> float:
    """Normal argument of the alpha-power binary with moneyness ``x/xi``."""
    if tau <= 0.0:
        raise ValueError("degenerate horizon: tau must be > 0")
    if x_over_xi <= 0.0:
        raise ValueError(f"x/xi must be > 0, got {x_over_xi!r}")
    drift = params.log_drift + alpha * params.sigma**2
    return (math.log(x_over_xi) + drift * tau) / (params.sigma * math.sqrt(tau))


def delta_arg(y: float, tau1: float, tau1p: float, alpha: float, params: MarketParams) -> float:
    """Like :func:`d_arg` but with separate drift time ``tau1`` and variance time ``tau1p``."""
    if tau1p <= 0.0:
        raise ValueError("degenerate variance: tau1p must be > 0")
    if y <= 0.0:
        raise ValueError(f"y must be > 0, got {y!r}")
    drift = params.log_drift + alpha * params.sigma**2
    return (math.log(y) + drift * tau1) / (params.sigma * math.sqrt(tau1p))


def check_spot(x: float, name: str = "x") -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"{name} must be a finite positive price, got {x!r}")
    return x


def as_signs(values: Sequence[object]) -> tuple[Sign, ...]:
    return tuple(Sign.parse(v) for v in values)
