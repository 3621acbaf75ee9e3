"""Alpha-power standard and binary options, first order through n-th order.

A first-order binary pays ``X_T^alpha`` when ``s X_T > s xi``.  An n-th
order binary with expiries ``T_0 < ... < T_{n-1}`` pays the (n-1)-th order
binary at ``T_0`` if ``s_0 X_{T_0} > s_0 xi_0``, so its value is driven by
the joint law of the log-price at all n dates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import MarketParams, PriceResult, Sign, as_signs, check_spot, d_arg, mu
from .gaussian import MVN_MAX_DIM, binorm_cdf, markov_correlation, markov_orthant_cdf, norm_cdf


@dataclass(frozen=True)
class PowerBinarySpec:
    alpha: float
    thresholds: tuple[float, ...]
    signs: tuple[Sign, ...]
    expiries: tuple[float, ...]

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not math.isfinite(alpha):
            raise ValueError(f"alpha must be finite, got {alpha!r}")
        thresholds = tuple(float(v) for v in self.thresholds)
        signs = as_signs(self.signs)
        expiries = tuple(float(v) for v in self.expiries)
        n = len(thresholds)
        if n == 0:
            raise ValueError("thresholds: order must be >= 1")
        if len(signs) != n or len(expiries) != n:
            raise ValueError(
                f"thresholds, signs and expiries must have equal length, got {n}, {len(signs)}, {len(expiries)}"
            )
        if any(not (math.isfinite(v) and v > 0.0) for v in thresholds):
            raise ValueError(f"thresholds must be finite and > 0, got {thresholds!r}")
        if any(b <= a for a, b in zip(expiries, expiries[1:])):
            raise ValueError(f"expiries must be strictly increasing, got {expiries!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "expiries", expiries)

    @property
    def order(self) -> int:
        return len(self.thresholds)

    @classmethod
    def first_order(cls, alpha: float, xi: float, sign: object, expiry: float) -> "PowerBinarySpec":
        return cls(alpha, (xi,), (Sign.parse(sign),), (expiry,))

    def tail(self, start: int) -> "PowerBinarySpec":
        """The lower-order binary made of legs ``start..n-1``."""
        return PowerBinarySpec(
            self.alpha, self.thresholds[start:], self.signs[start:], self.expiries[start:]
        )


@dataclass(frozen=True)
class GeneralBinaryCondition:
    """Indicator ``1(s x^beta > s xi)``."""

    beta: float
    xi: float
    s: Sign

    def __post_init__(self) -> None:
        if float(self.beta) == 0.0 or not math.isfinite(self.beta):
            raise ValueError("constant condition: beta must be finite and non-zero")
        if not (math.isfinite(self.xi) and self.xi > 0.0):
            raise ValueError(f"xi must be finite and > 0, got {self.xi!r}")
        object.__setattr__(self, "s", Sign.parse(self.s))


def indicator(x: float, xi: float, sign: Sign) -> float:
    """``1(s x > s xi)``; the boundary ``x == xi`` counts as 0."""
    return 1.0 if int(sign) * (x - xi) > 0.0 else 0.0


def power_binary_payoff(x: float, alpha: float, xi: float, sign: Sign) -> float:
    return x**alpha * indicator(x, xi, sign)


def power_standard_price(x: float, t: float, T: float, alpha: float, params: MarketParams) -> PriceResult:
    x = check_spot(x)
    if t > T:
        raise ValueError(f"valuation time t={t!r} is after expiry T={T!r}")
    m = mu(params, alpha)
    return PriceResult(math.exp(m * (T - t)) * x**alpha, {"mu": m, "tau": T - t})


def power_binary_price(x: float, t: float, spec: PowerBinarySpec, params: MarketParams) -> PriceResult:
    """``e^{mu (T-t)} x^alpha N(s d)`` for an order-1 spec."""
    if spec.order != 1:
        raise ValueError(f"power_binary_price needs an order-1 spec, got order {spec.order}")
    x = check_spot(x)
    (xi,), (s,), (T,) = spec.thresholds, spec.signs, spec.expiries
    if t > T:
        raise ValueError(f"valuation time t={t!r} is after expiry T={T!r}")
    if t == T:
        return PriceResult(power_binary_payoff(x, spec.alpha, xi, s), {"tau": 0.0})
    tau = T - t
    m = mu(params, spec.alpha)
    d = d_arg(x / xi, params, spec.alpha, tau)
    value = math.exp(m * tau) * x**spec.alpha * norm_cdf(int(s) * d)
    return PriceResult(value, {"d": d, "mu": m, "tau": tau})


def reduce_general_condition(alpha: float, cond: GeneralBinaryCondition, expiry: float) -> PowerBinarySpec:
    """Rewrite ``x^alpha 1(s x^beta > s xi)`` as a plain power binary.

    A negative ``beta`` flips the inequality; the threshold becomes
    ``xi^(1/beta)``.
    """
    sign = Sign(int(cond.s) * (1 if cond.beta > 0 else -1))
    return PowerBinarySpec.first_order(alpha, cond.xi ** (1.0 / cond.beta), sign, expiry)


def _settle_elapsed(x: float, t: float, spec: PowerBinarySpec) -> tuple[float, PowerBinarySpec | None]:
    """Apply indicators of legs whose expiry equals ``t``.

    Returns the multiplier (0 or 1) and the remaining spec, or ``None`` when
    nothing remains.
    """
    start = 0
    while start < spec.order and spec.expiries[start] <= t:
        if spec.expiries[start] < t:
            raise ValueError(f"valuation time t={t!r} is after expiry {spec.expiries[start]!r}")
        if indicator(x, spec.thresholds[start], spec.signs[start]) == 0.0:
            return 0.0, None
        start += 1
    if start == spec.order:
        return 1.0, None
    return 1.0, spec.tail(start) if start else spec


def second_order_binary_price(x: float, t: float, spec: PowerBinarySpec, params: MarketParams) -> PriceResult:
    """Closed form with the bivariate normal CDF and correlation sqrt((T0-t)/(T1-t))."""
    if spec.order != 2:
        raise ValueError(f"second_order_binary_price needs an order-2 spec, got order {spec.order}")
    x = check_spot(x)
    factor, rest = _settle_elapsed(x, t, spec)
    if rest is None:
        return PriceResult(factor * x**spec.alpha if factor else 0.0, {"tau": 0.0})
    if rest.order == 1:
        return power_binary_price(x, t, rest, params)

    (xi0, xi1), (s0, s1), (T0, T1) = spec.thresholds, spec.signs, spec.expiries
    m = mu(params, spec.alpha)
    d0 = d_arg(x / xi0, params, spec.alpha, T0 - t)
    d1 = d_arg(x / xi1, params, spec.alpha, T1 - t)
    rho = math.sqrt((T0 - t) / (T1 - t))
    prob = binorm_cdf(int(s0) * d0, int(s1) * d1, int(s0) * int(s1) * rho)
    value = math.exp(m * (T1 - t)) * x**spec.alpha * prob
    return PriceResult(value, {"d0": d0, "d1": d1, "rho": rho, "mu": m, "tau": T1 - t})


def nth_order_binary_price(
    x: float,
    t: float,
    spec: PowerBinarySpec,
    params: MarketParams,
) -> PriceResult:
    """``x^alpha e^{mu (T_{n-1}-t)} N_n(s_i d_i; signed Markov correlation)``.

    The Markov structure of the correlation reduces the n-variate CDF to a
    chain of one-dimensional integrals, so this is deterministic and
    accurate to roughly 1e-13 for any order.
    """
    if spec.order > MVN_MAX_DIM:
        raise ValueError(f"order too large: {spec.order} > {MVN_MAX_DIM}")
    x = check_spot(x)
    factor, rest = _settle_elapsed(x, t, spec)
    if rest is None:
        return PriceResult(factor * x**spec.alpha if factor else 0.0, {"tau": 0.0})

    n = rest.order
    m = mu(params, rest.alpha)
    d = [d_arg(x / xi, params, rest.alpha, T - t) for xi, T in zip(rest.thresholds, rest.expiries)]
    limits = [int(s) * di for s, di in zip(rest.signs, d)]
    corr = markov_correlation(t, rest.expiries, rest.signs)
    res = markov_orthant_cdf(limits, corr)
    tau = rest.expiries[-1] - t
    value = x**rest.alpha * math.exp(m * tau) * res.prob
    diag = {f"d{i}": di for i, di in enumerate(d)}
    diag.update(mu=m, tau=tau, mvn_error=res.error, order=float(n))
    return PriceResult(value, diag)


def binary_price(x: float, t: float, spec: PowerBinarySpec, params: MarketParams) -> PriceResult:
    """Dispatch on order to the dedicated closed form."""
    if spec.order == 1:
        return power_binary_price(x, t, spec, params)
    if spec.order == 2:
        return second_order_binary_price(x, t, spec, params)
    return nth_order_binary_price(x, t, spec, params)


def power_binary_parity_gap(x: float, t: float, alpha: float, xi: float, T: float, params: MarketParams) -> float:
    """Up plus down minus standard; zero up to rounding."""
    up = power_binary_price(x, t, PowerBinarySpec.first_order(alpha, xi, Sign.UP, T), params).value
    down = power_binary_price(x, t, PowerBinarySpec.first_order(alpha, xi, Sign.DOWN, T), params).value
    return up + down - power_standard_price(x, t, T, alpha, params).value


def thresholds_from(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)
