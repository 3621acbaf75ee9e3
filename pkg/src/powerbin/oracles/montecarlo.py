"""Risk-neutral Monte Carlo with exact lognormal steps between dates.

Block ``b`` draws from ``default_rng(SeedSequence([seed, b]))``, so a
price depends only on the seed and the path count, never on how blocks
are scheduled.  With antithetics each sample is the mean of a path and its
mirror, and the standard error comes from those pair means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..binaries import PowerBinarySpec
from ..contracts import ContractSpec, NormDistContract, PowerStandardSpec, kind_of
from ..core import MarketParams, PriceResult, check_spot
from ..gaussian import norm_cdf
from ..products.asian import ContAsianFixedSpec, ContAsianFloatingSpec, GeoAsianFixedSpec, GeoAsianFloatingSpec
from ..products.savings import SavingsPlanSpec


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 0
    antithetic: bool = True
    steps_per_interval: int = 1 << 10
    block_paths: int = 1 << 13

    def __post_init__(self) -> None:
        if self.paths < 2:
            raise ValueError(f"paths must be >= 2, got {self.paths}")
        if self.antithetic and self.paths % 2:
            raise ValueError(f"paths must be even with antithetic sampling, got {self.paths}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.steps_per_interval < 1 or self.block_paths < 2 or self.block_paths % 2:
            raise ValueError("steps_per_interval must be >= 1 and block_paths even and >= 2")


class _Moments:
    """Count, mean and centered sum of squares, merged pairwise."""

    def __init__(self) -> None:
        self.n, self.mean, self.m2 = 0, 0.0, 0.0

    def add(self, samples: np.ndarray) -> None:
        nb = samples.size
        mb = float(samples.mean())
        m2b = float(((samples - mb) ** 2).sum())
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * self.n * nb / n
        self.n = n

    @property
    def stderr(self) -> float:
        return math.sqrt(self.m2 / (self.n - 1) / self.n) if self.n > 1 else math.inf


class _Plan:
    """What to simulate for one contract and how to turn log-prices into payoffs."""

    def __init__(self, params, times, payoff, discount, continuous=False):
        self.params = params
        self.times = np.asarray(times, dtype=float)
        self.payoff = payoff
        self.discount = discount
        self.continuous = continuous


def _future(times, t):
    return [s for s in times if s > t]


def _plan(contract: ContractSpec, x: float, t: float, params: MarketParams | None, J: float | None) -> _Plan:
    kind = kind_of(contract)
    if kind == "savings_plan":
        spec: SavingsPlanSpec = contract
        p = spec.foreign_params
        K_d, K_f = math.exp(spec.r_d * spec.T), math.exp(spec.r_f * spec.T) / spec.x0
        return _Plan(p, [spec.T], lambda L: np.maximum(K_d * np.exp(-L[:, -1]), K_f), math.exp(-p.r * (spec.T - t)))
    if params is None:
        raise ValueError(f"{kind} needs market parameters")
    disc = lambda T: math.exp(-params.r * (T - t))  # noqa: E731

    if isinstance(contract, PowerStandardSpec):
        a = contract.alpha
        return _Plan(params, [contract.T], lambda L: np.exp(a * L[:, -1]), disc(contract.T))

    if isinstance(contract, PowerBinarySpec):
        live = [i for i, T in enumerate(contract.expiries) if T > t]
        factor = 1.0
        for i, T in enumerate(contract.expiries):
            if T == t and int(contract.signs[i]) * (x - contract.thresholds[i]) <= 0.0:
                factor = 0.0
            elif T < t:
                raise ValueError(f"valuation time t={t!r} is after expiry {T!r}")
        a = contract.alpha
        logs = np.log(contract.thresholds)
        if not live:
            return _Plan(params, [], lambda L: np.full(L.shape[0], factor * x**a), 1.0)

        def pay(L):
            ok = np.ones(L.shape[0], dtype=bool)
            for col, i in enumerate(live):
                ok &= int(contract.signs[i]) * (L[:, col] - logs[i]) > 0.0
            return factor * np.where(ok, np.exp(a * L[:, -1]), 0.0)

        return _Plan(params, [contract.expiries[i] for i in live], pay, disc(contract.expiries[-1]))

    if isinstance(contract, NormDistContract):
        s = contract.payoff

        def pay(L):
            y = np.exp(s.i * L[:, -1]) / s.K
            d = (np.log(y) + (params.log_drift + s.alpha * params.sigma**2) * s.tau1) / (params.sigma * math.sqrt(s.tau1p))
            return np.exp(s.beta * L[:, -1]) * norm_cdf(d)

        if s.tau1p <= 0.0:
            raise ValueError("degenerate variance: tau1p must be > 0 for simulation")
        return _Plan(params, [contract.T], pay, disc(contract.T))

    if isinstance(contract, (GeoAsianFixedSpec, GeoAsianFloatingSpec)):
        times = contract.schedule.times
        n = len(times)
        m = sum(1 for s in times if s <= t)
        if len(contract.fixings) != m:
            raise ValueError(f"fixing count inconsistent with t={t!r}: expected {m}, got {len(contract.fixings)}")
        base = contract.fixings.log_sum
        fut = _future(times, t)
        T = contract.schedule.expiry
        if isinstance(contract, GeoAsianFixedSpec):
            K = contract.K
            pay = lambda L: np.maximum(np.exp((base + L.sum(axis=1)) / n) - K, 0.0)  # noqa: E731
        else:
            pay = lambda L: np.maximum(np.exp(L[:, -1]) - np.exp((base + L.sum(axis=1)) / n), 0.0)  # noqa: E731
        if not fut:
            if t > T:
                raise ValueError(f"valuation time t={t!r} is after expiry {T!r}")
            final = _expired_asian(contract, n, base)
            return _Plan(params, [], lambda L: np.full(L.shape[0], final), 1.0)
        return _Plan(params, fut, pay, disc(T))

    if isinstance(contract, (ContAsianFixedSpec, ContAsianFloatingSpec)):
        T = contract.T
        if not t < T:
            raise ValueError("continuous Asian simulation needs t < T")
        if t > 0.0 and J is None:
            raise ValueError("continuous Asian valued after inception needs the running average J")
        logJ_t = t * math.log(J) if t > 0.0 else 0.0
        if isinstance(contract, ContAsianFixedSpec):
            K = contract.K
            pay = lambda L, I: np.maximum(np.exp((logJ_t + I) / T) - K, 0.0)  # noqa: E731
        else:
            pay = lambda L, I: np.maximum(np.exp(L) - np.exp((logJ_t + I) / T), 0.0)  # noqa: E731
        return _Plan(params, [T], pay, disc(T), continuous=True)

    raise TypeError(f"unsupported contract kind {kind}")


def _expired_asian(contract, n, base):
    g = math.exp(base / n)
    if isinstance(contract, GeoAsianFixedSpec):
        return max(g - contract.K, 0.0)
    return max(contract.fixings.fixings[-1] - g, 0.0)


def _block_samples(plan: _Plan, x: float, t: float, z: np.ndarray, cfg: McConfig) -> np.ndarray:
    p = plan.params
    lx = math.log(x)
    if plan.continuous:
        T = plan.times[-1]
        N = cfg.steps_per_interval
        h = (T - t) / N
        w = N - np.arange(N) - 0.5
        vol = p.sigma * math.sqrt(h)
        terminal = lx + p.log_drift * (T - t) + vol * z.sum(axis=1)
        # trapezoid rule for the time integral of the log-price over [t, T]
        integral = h * (N * lx + p.log_drift * h * w.sum() + vol * (z @ w))
        return plan.payoff(terminal, integral) * plan.discount
    if plan.times.size == 0:
        return plan.payoff(np.empty((z.shape[0], 0))) * plan.discount
    dt = np.diff(np.concatenate([[t], plan.times]))
    inc = p.log_drift * dt + p.sigma * np.sqrt(dt) * z
    L = lx + np.cumsum(inc, axis=1)
    return plan.payoff(L) * plan.discount


def mc_price(
    contract: ContractSpec,
    x: float,
    t: float,
    params: MarketParams | None,
    cfg: McConfig = McConfig(),
    *,
    J: float | None = None,
) -> PriceResult:
    """Discounted sample mean of the payoff with its standard error.

    ``params`` is ignored for the savings plan, which is simulated under the
    foreign measure.  ``J`` is the running geometric average for continuous
    Asians valued after inception.
    """
    x = check_spot(x)
    plan = _plan(contract, x, t, params, J)
    width = cfg.steps_per_interval if plan.continuous else plan.times.size
    stats = _Moments()
    remaining = cfg.paths
    block = 0
    while remaining > 0:
        size = min(cfg.block_paths, remaining)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, block]))
        if cfg.antithetic:
            half = rng.standard_normal((size // 2, max(width, 1)))[:, :width]
            v = _block_samples(plan, x, t, np.concatenate([half, -half]), cfg)
            samples = 0.5 * (v[: size // 2] + v[size // 2 :])
        else:
            samples = _block_samples(plan, x, t, rng.standard_normal((size, max(width, 1)))[:, :width], cfg)
        stats.add(np.asarray(samples, dtype=float))
        remaining -= size
        block += 1
    diag = {"paths": float(cfg.paths), "samples": float(stats.n), "blocks": float(block)}
    return PriceResult(stats.mean, diag, stderr=stats.stderr)
