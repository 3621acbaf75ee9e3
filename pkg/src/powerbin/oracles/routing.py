"""Map each contract kind onto the quadrature oracle."""

from __future__ import annotations

import math

import numpy as np

from ..binaries import PowerBinarySpec
from ..contracts import ContractSpec, NormDistContract, PowerStandardSpec, kind_of
from ..core import MarketParams, PriceResult
from ..gaussian import norm_cdf
from ..products.asian import GeoAsianFixedSpec, GeoAsianFloatingSpec
from ..products.savings import SavingsPlanSpec
from .quadrature import MAX_NESTING, QuadratureConfig, greens_price, nested_greens_price


class UnsupportedContract(TypeError):
    """The requested oracle cannot price this contract."""


def quad_price(
    contract: ContractSpec,
    x: float,
    t: float,
    params: MarketParams | None,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> PriceResult:
    kind = kind_of(contract)
    if isinstance(contract, SavingsPlanSpec):
        p = contract.foreign_params
        K_d = math.exp(contract.r_d * contract.T)
        K_f = math.exp(contract.r_f * contract.T) / contract.x0
        tau = _live(contract.T - t)
        return greens_price(lambda z: np.maximum(K_d / z, K_f), x, tau, p, cfg, breakpoints=[contract.strike], growth=-1.0)
    if params is None:
        raise ValueError(f"{kind} needs market parameters")

    if isinstance(contract, PowerStandardSpec):
        a = contract.alpha
        return greens_price(lambda z: z**a, x, _live(contract.T - t), params, cfg, growth=a)

    if isinstance(contract, NormDistContract):
        s = contract.payoff
        if s.tau1p <= 0.0:
            raise UnsupportedContract("normdist payoff with tau1p = 0 is a step function; price it with power_binary")

        def pay(z):
            d = (s.i * np.log(z) - math.log(s.K) + (params.log_drift + s.alpha * params.sigma**2) * s.tau1) / (
                params.sigma * math.sqrt(s.tau1p)
            )
            return z**s.beta * norm_cdf(d)

        return greens_price(pay, x, _live(contract.T - t), params, cfg, growth=s.beta)

    if isinstance(contract, PowerBinarySpec):
        factor = 1.0
        live = []
        for i, T in enumerate(contract.expiries):
            if T == t:
                factor *= 1.0 if int(contract.signs[i]) * (x - contract.thresholds[i]) > 0.0 else 0.0
            elif T > t:
                live.append(i)
        if not live:
            raise UnsupportedContract("contract has expired; nothing to integrate")
        a = contract.alpha
        xi = np.array([contract.thresholds[i] for i in live])
        sg = np.array([int(contract.signs[i]) for i in live])
        if len(live) > MAX_NESTING:
            raise UnsupportedContract(f"nesting too deep for quadrature: {len(live)} dates > {MAX_NESTING}")

        def pay(P):
            ok = np.all(sg * (P - xi) > 0.0, axis=1)
            return factor * np.where(ok, P[:, -1] ** a, 0.0)

        def cuts(j, prefix):
            return np.full((prefix.shape[0], 1), xi[j])

        dates = [contract.expiries[i] for i in live]
        return nested_greens_price(pay, x, t, dates, params, cfg, breakpoints=cuts, growth=a)

    if isinstance(contract, (GeoAsianFixedSpec, GeoAsianFloatingSpec)):
        times = contract.schedule.times
        n = len(times)
        dates = [s for s in times if s > t]
        if not dates:
            raise UnsupportedContract("contract has expired; nothing to integrate")
        if len(dates) > MAX_NESTING:
            raise UnsupportedContract(f"nesting too deep for quadrature: {len(dates)} dates > {MAX_NESTING}")
        base = contract.fixings.log_sum
        depth = len(dates)
        fixed = isinstance(contract, GeoAsianFixedSpec)

        def pay(P):
            g = np.exp((base + np.log(P).sum(axis=1)) / n)
            return np.maximum(g - contract.K, 0.0) if fixed else np.maximum(P[:, -1] - g, 0.0)

        def cuts(j, prefix):
            if j < depth - 1:
                return np.empty((prefix.shape[0], 0))
            known = base + np.log(prefix).sum(axis=1)
            level = n * math.log(contract.K) - known if fixed else known / (n - 1)
            return np.exp(level)[:, None]

        return nested_greens_price(pay, x, t, dates, params, cfg, breakpoints=cuts)

    raise UnsupportedContract(f"no quadrature route for {kind}")


def _live(tau: float) -> float:
    if tau <= 0.0:
        raise UnsupportedContract("contract has expired; nothing to integrate")
    return tau
