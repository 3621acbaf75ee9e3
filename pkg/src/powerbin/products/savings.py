"""FX savings plan that pays the better of domestic and foreign accrual.

One foreign unit bought at rate ``x0`` at time 0 pays at ``T``, in foreign
currency, ``max(e^{r_d T} / X_T, e^{r_f T} / x0)``.  Valued in foreign
currency this is a Black-Scholes problem in ``X`` with rate ``r_f``,
dividend ``2 r_f - r_d - sigma^2`` and volatility ``sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..binaries import PowerBinarySpec, power_binary_price
from ..core import MarketParams, PriceResult, Sign, check_spot
from ..gaussian import norm_cdf


@dataclass(frozen=True)
class SavingsPlanSpec:
    r_d: float
    r_f: float
    x0: float
    T: float
    sigma: float

    def __post_init__(self) -> None:
        for name in ("r_d", "r_f", "x0", "T", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.x0 <= 0.0:
            raise ValueError(f"x0 must be > 0, got {self.x0!r}")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma!r}")
        if self.T < 0.0:
            raise ValueError(f"T must be >= 0, got {self.T!r}")

    @property
    def strike(self) -> float:
        """Rate at which the two accruals pay the same."""
        return self.x0 * math.exp((self.r_d - self.r_f) * self.T)

    @property
    def foreign_params(self) -> MarketParams:
        """Equivalent Black-Scholes coefficients in foreign currency."""
        return MarketParams(self.r_f, 2.0 * self.r_f - self.r_d - self.sigma**2, self.sigma)


def savings_plan_payoff(X: float, spec: SavingsPlanSpec) -> float:
    return max(math.exp(spec.r_d * spec.T) / X, math.exp(spec.r_f * spec.T) / spec.x0)


def savings_plan_by_binaries(X: float, t: float, spec: SavingsPlanSpec) -> float:
    """Same value assembled from a (-1)-power down binary and a cash up binary."""
    p = spec.foreign_params
    K = spec.strike
    down = power_binary_price(X, t, PowerBinarySpec.first_order(-1.0, K, Sign.DOWN, spec.T), p).value
    up = power_binary_price(X, t, PowerBinarySpec.first_order(0.0, K, Sign.UP, spec.T), p).value
    return math.exp(spec.r_d * spec.T) * down + math.exp(spec.r_f * spec.T) / spec.x0 * up


def savings_plan_price(X: float, t: float, spec: SavingsPlanSpec) -> PriceResult:
    """Foreign-currency value at exchange rate ``X`` and time ``t``."""
    X = check_spot(X, "X")
    if t > spec.T:
        raise ValueError(f"valuation time t={t!r} is after maturity T={spec.T!r}")
    if t == spec.T:
        return PriceResult(savings_plan_payoff(X, spec), {"tau": 0.0})
    tau = spec.T - t
    vol = spec.sigma * math.sqrt(tau)
    d1 = (math.log(X / spec.x0) + (spec.r_f - spec.r_d) * t - 0.5 * spec.sigma**2 * tau) / vol
    d2 = d1 + vol
    value = math.exp(spec.r_d * t) / X * norm_cdf(-d1) + math.exp(spec.r_f * t) / spec.x0 * norm_cdf(d2)
    gap = value - savings_plan_by_binaries(X, t, spec)
    return PriceResult(value, {"d1": d1, "d2": d2, "tau": tau, "route_gap": gap})
