"""Option paying ``X^beta * N(delta(X^i / K, tau1, tau1p, alpha))`` at expiry.

Pricing this payoff in closed form is what lets a discrete geometric Asian
be rolled back one monitoring interval at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import MarketParams, PriceResult, check_spot, delta_arg, mu
from .gaussian import norm_cdf


@dataclass(frozen=True)
class NormDistPayoffSpec:
    beta: float
    i: float
    K: float
    alpha: float
    tau1: float
    tau1p: float

    def __post_init__(self) -> None:
        for name in ("beta", "i", "K", "alpha", "tau1", "tau1p"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.K <= 0.0:
            raise ValueError(f"K must be > 0, got {self.K!r}")
        if self.tau1p < 0.0:
            raise ValueError(f"tau1p must be >= 0, got {self.tau1p!r}")


def normdist_payoff(X: float, spec: NormDistPayoffSpec, params: MarketParams) -> float:
    y = X**spec.i / spec.K
    return X**spec.beta * norm_cdf(delta_arg(y, spec.tau1, spec.tau1p, spec.alpha, params))


def normdist_d1(X: float, tau: float, spec: NormDistPayoffSpec, params: MarketParams) -> float:
    """Normal argument after ``tau`` years, in the affine form that needs no division by ``i tau + tau1``."""
    var = spec.i**2 * tau + spec.tau1p
    if var <= 0.0:
        raise ValueError("degenerate variance: i^2 tau + tau1p must be > 0")
    log_y = spec.i * math.log(X) - math.log(spec.K)
    num = (
        log_y
        + params.log_drift * (spec.i * tau + spec.tau1)
        + params.sigma**2 * (spec.i * spec.beta * tau + spec.alpha * spec.tau1)
    )
    return num / (params.sigma * math.sqrt(var))


def normdist_price(X: float, tau: float, spec: NormDistPayoffSpec, params: MarketParams) -> PriceResult:
    """``X^beta e^{mu(beta) tau} N(d1)``; the exact payoff when ``tau == 0``."""
    X = check_spot(X, "X")
    if not (math.isfinite(tau) and tau >= 0.0):
        raise ValueError(f"tau must be finite and >= 0, got {tau!r}")
    if tau == 0.0:
        return PriceResult(normdist_payoff(X, spec, params), {"tau": 0.0})
    d1 = normdist_d1(X, tau, spec, params)
    m = mu(params, spec.beta)
    value = X**spec.beta * math.exp(m * tau) * norm_cdf(d1)
    return PriceResult(value, {"d1": d1, "mu": m, "tau": tau})
