"""Geometric-average Asian options, discretely and continuously monitored.

Discrete contracts average the closes at the schedule dates ``T_1..T_n``;
a valuation at ``t`` in ``[T_m, T_{m+1})`` has the first ``m`` closes
already fixed (a fixing taken exactly at ``t`` counts as recorded).  With
``k = n - m`` closes still to come, the remaining intervals carry weights
``k, k-1, ..., 1``: the weight of an interval is the number of future
fixings whose log-price includes its Brownian increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import FixedObservations, MarketParams, MonitoringSchedule, PriceResult, check_spot, mu
from ..gaussian import norm_cdf


@dataclass(frozen=True)
class GeoAsianFixedSpec:
    schedule: MonitoringSchedule
    K: float
    fixings: FixedObservations = FixedObservations()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.K) and self.K > 0.0):
            raise ValueError(f"strike K must be finite and > 0, got {self.K!r}")
        _check_schedule(self.schedule, self.fixings)


@dataclass(frozen=True)
class GeoAsianFloatingSpec:
    schedule: MonitoringSchedule
    fixings: FixedObservations = FixedObservations()

    def __post_init__(self) -> None:
        _check_schedule(self.schedule, self.fixings)


@dataclass(frozen=True)
class AsianState:
    """Running continuous geometric average ``J`` observed at time ``t``."""

    J: float
    t: float

    def __post_init__(self) -> None:
        check_spot(self.J, "J")
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"t must be finite and >= 0, got {self.t!r}")


@dataclass(frozen=True)
class ContAsianFixedSpec:
    K: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.K) and self.K > 0.0):
            raise ValueError(f"strike K must be finite and > 0, got {self.K!r}")
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"T must be finite and > 0, got {self.T!r}")


@dataclass(frozen=True)
class ContAsianFloatingSpec:
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"T must be finite and > 0, got {self.T!r}")


@dataclass(frozen=True)
class AsianCoefficients:
    """Intermediate scalars of the discrete closed forms.

    ``Delta_k`` is the standard deviation of the sum of the ``k`` future
    log-fixings and ``theta_k`` the log growth of the geometric-mean leg.
    """

    n: int
    k: int
    Delta_k: float
    theta_k: float
    d1: float
    d2: float

    def as_dict(self) -> dict[str, float]:
        return {
            "n": float(self.n),
            "k": float(self.k),
            "Delta_k": self.Delta_k,
            "theta_k": self.theta_k,
            "d1": self.d1,
            "d2": self.d2,
        }


def _check_schedule(schedule: MonitoringSchedule, fixings: FixedObservations) -> None:
    if len(schedule) < 2:
        raise ValueError(f"a discrete Asian needs at least 2 monitoring times, got {len(schedule)}")
    if len(fixings) > len(schedule):
        raise ValueError(f"{len(fixings)} fixings for a schedule of {len(schedule)} dates")


def _remaining(t: float, schedule: MonitoringSchedule, fixings: FixedObservations) -> tuple[list[float], list[int]]:
    """Interval lengths and weights still ahead of ``t``."""
    times = schedule.times
    n = len(times)
    m = sum(1 for s in times if s <= t)
    if len(fixings) != m:
        raise ValueError(
            f"fixing count inconsistent with t={t!r}: {m} monitoring dates have passed but {len(fixings)} fixings given"
        )
    if m == n:
        return [], []
    k = n - m
    dt = [times[m] - t] + [times[j + 1] - times[j] for j in range(m, n - 1)]
    weights = list(range(k, 0, -1))
    return dt, weights


def _theta(dt: list[float], weights: list[int], n: int, params: MarketParams) -> float:
    return math.fsum(mu(params, w / n) * h for w, h in zip(weights, dt))


def fixed_strike_coefficients(
    X: float, t: float, spec: GeoAsianFixedSpec, params: MarketParams
) -> AsianCoefficients:
    X = check_spot(X, "X")
    n = len(spec.schedule)
    dt, w = _remaining(t, spec.schedule, spec.fixings)
    if not w:
        raise ValueError("contract has expired; no coefficients")
    k = w[0]
    sigma = params.sigma
    delta = sigma * math.sqrt(math.fsum(wi * wi * h for wi, h in zip(w, dt)))
    num = (
        spec.fixings.log_sum
        + k * math.log(X)
        - n * math.log(spec.K)
        + params.log_drift * math.fsum(wi * h for wi, h in zip(w, dt))
    )
    d2 = num / delta
    return AsianCoefficients(n, k, delta, _theta(dt, w, n, params), d2 + delta / n, d2)


def discrete_geo_asian_fixed_price(
    X: float, t: float, spec: GeoAsianFixedSpec, params: MarketParams
) -> PriceResult:
    """Call on the geometric mean of the ``n`` scheduled closes, strike ``K``."""
    X = check_spot(X, "X")
    n = len(spec.schedule)
    dt, w = _remaining(t, spec.schedule, spec.fixings)
    if not w:
        if t > spec.schedule.expiry:
            raise ValueError(f"valuation time t={t!r} is after expiry {spec.schedule.expiry!r}")
        g = math.exp(spec.fixings.log_sum / n)
        return PriceResult(max(g - spec.K, 0.0), {"k": 0.0})
    c = fixed_strike_coefficients(X, t, spec, params)
    lead = math.exp(spec.fixings.log_sum / n + (c.k / n) * math.log(X) + c.theta_k)
    disc = math.exp(-params.r * (spec.schedule.expiry - t))
    value = lead * norm_cdf(c.d1) - spec.K * disc * norm_cdf(c.d2)
    return PriceResult(value, c.as_dict())


def floating_strike_coefficients(
    X: float,
    t: float,
    spec: GeoAsianFloatingSpec,
    params: MarketParams,
    *,
    _drop_share_drift: bool = False,
) -> AsianCoefficients:
    """Coefficients of the floating-strike call.

    Multiplying ``ln X_T - ln G`` by ``n/(n-1)`` gives each interval the
    weight ``(n - w)/(n - 1)``.  ``d2`` belongs to the asset leg, ``d1`` to
    the average leg.  ``_drop_share_drift`` drops the sigma^2 drift shift
    of the asset leg; that variant is kept only so the tests can show it
    disagrees with simulation.
    """
    X = check_spot(X, "X")
    n = len(spec.schedule)
    dt, w = _remaining(t, spec.schedule, spec.fixings)
    if not w:
        raise ValueError("contract has expired; no coefficients")
    k = w[0]
    sigma2 = params.sigma**2
    c = [(n - wi) / (n - 1) for wi in w]
    sd = params.sigma * math.sqrt(math.fsum(ci * ci * h for ci, h in zip(c, dt)))
    a = ((n - k) / (n - 1)) * math.log(X) - spec.fixings.log_sum / (n - 1)
    drift = params.log_drift * math.fsum(ci * h for ci, h in zip(c, dt))
    avg_shift = sigma2 * math.fsum(wi * (n - wi) / (n * (n - 1)) * h for wi, h in zip(w, dt))
    asset_shift = 0.0 if _drop_share_drift else sigma2 * math.fsum(ci * h for ci, h in zip(c, dt))
    d1 = (a + drift + avg_shift) / sd
    d2 = (a + drift + asset_shift) / sd
    return AsianCoefficients(n, k, sd, _theta(dt, w, n, params), d1, d2)


def discrete_geo_asian_floating_price(
    X: float,
    t: float,
    spec: GeoAsianFloatingSpec,
    params: MarketParams,
    *,
    _drop_share_drift: bool = False,
) -> PriceResult:
    """Call paying ``(X_{T_n} - G)^+`` with ``G`` the geometric mean of all ``n`` closes."""
    X = check_spot(X, "X")
    n = len(spec.schedule)
    dt, w = _remaining(t, spec.schedule, spec.fixings)
    if not w:
        if t > spec.schedule.expiry:
            raise ValueError(f"valuation time t={t!r} is after expiry {spec.schedule.expiry!r}")
        g = math.exp(spec.fixings.log_sum / n)
        return PriceResult(max(spec.fixings.fixings[-1] - g, 0.0), {"k": 0.0})
    c = floating_strike_coefficients(X, t, spec, params, _drop_share_drift=_drop_share_drift)
    tau = spec.schedule.expiry - t
    lead = math.exp(spec.fixings.log_sum / n + (c.k / n) * math.log(X) + c.theta_k)
    value = X * math.exp(-params.q * tau) * norm_cdf(c.d2) - lead * norm_cdf(c.d1)
    return PriceResult(value, c.as_dict())


def _continuous_inputs(X: float, state: AsianState, T: float) -> tuple[float, float]:
    X = check_spot(X, "X")
    if state.t > T:
        raise ValueError(f"valuation time t={state.t!r} is after expiry T={T!r}")
    return X, T - state.t


def continuous_geo_asian_fixed_price(
    X: float, state: AsianState, K: float, T: float, params: MarketParams
) -> PriceResult:
    """Call on ``exp((1/T) int_0^T ln X_s ds)`` with strike ``K``."""
    X, tau = _continuous_inputs(X, state, T)
    if not (math.isfinite(K) and K > 0.0):
        raise ValueError(f"strike K must be finite and > 0, got {K!r}")
    t = state.t
    if tau == 0.0:
        return PriceResult(max(state.J - K, 0.0), {"tau": 0.0})
    r_star = params.log_drift * tau / (2.0 * T)
    s_star = params.sigma * tau / (math.sqrt(3.0) * T)
    log_fwd = (t * math.log(state.J) + tau * math.log(X)) / T
    d1 = (log_fwd - math.log(K) + (r_star + s_star**2) * tau) / (s_star * math.sqrt(tau))
    d2 = d1 - s_star * math.sqrt(tau)
    disc = math.exp(-params.r * tau)
    lead = math.exp(log_fwd + (r_star + 0.5 * s_star**2) * tau)
    value = disc * (lead * norm_cdf(d1) - K * norm_cdf(d2))
    return PriceResult(value, {"d1": d1, "d2": d2, "r_star": r_star, "sigma_star": s_star, "tau": tau})


def continuous_geo_asian_floating_price(
    X: float,
    state: AsianState,
    T: float,
    params: MarketParams,
    *,
    _sigma_power: int = 2,
    _drift_sign: float = 1.0,
) -> PriceResult:
    """Call paying ``(X_T - G_T)^+`` with ``G_T`` the continuous geometric mean.

    The private knobs switch the sigma power of the average-leg shift and
    the sign of the half-variance in the drift; only the defaults agree with
    simulation and the tests pin that.
    """
    X, tau = _continuous_inputs(X, state, T)
    t = state.t
    if tau == 0.0:
        return PriceResult(max(X - state.J, 0.0), {"tau": 0.0})
    sigma = params.sigma
    b = params.r - params.q + _drift_sign * 0.5 * sigma**2
    cube = T**3 - t**3
    scale = math.sqrt(3.0) / (sigma * math.sqrt(cube))
    core = t * math.log(X / state.J) + b * (T**2 - t**2) / 2.0
    d2 = scale * core
    d1 = scale * (core - sigma**_sigma_power * cube / (3.0 * T))
    theta = -params.q * tau - b * (T**2 - t**2) / (2.0 * T) + sigma**2 * cube / (6.0 * T**2)
    lead = state.J ** (t / T) * X ** (tau / T) * math.exp(theta)
    value = math.exp(-params.q * tau) * X * norm_cdf(d2) - lead * norm_cdf(d1)
    return PriceResult(value, {"d1": d1, "d2": d2, "theta": theta, "tau": tau})
