"""Expectation of a payoff under lognormal transitions by Gauss-Legendre quadrature.

Each transition is integrated in the standardized Gaussian coordinate
``z`` with ``X_next = X exp(nu dt + sigma sqrt(dt) z)``, on
``[c - h, c + h]`` where ``h`` is the configured half width and ``c`` a
tilt for payoffs that grow like a power of the price.  Kinks and jumps of
the payoff are passed as breakpoints so every panel sees a smooth
integrand.  Panels are doubled until two successive estimates agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..core import MarketParams, PriceResult, check_spot

MAX_NESTING = 5
_CHUNK = 1 << 21


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, estimates: tuple[float, float]):
        super().__init__(f"{message}; last two estimates {estimates[0]!r}, {estimates[1]!r}")
        self.estimates = estimates


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    max_refinements: int = 8
    integration_half_width: float = 10.0
    initial_panels: int = 2
    gl_points: int = 20
    max_nodes: int = 1 << 26

    def __post_init__(self) -> None:
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if self.integration_half_width < 8.0:
            raise ValueError(f"integration_half_width must be >= 8, got {self.integration_half_width!r}")
        if self.max_refinements < 1 or self.initial_panels < 1 or self.gl_points < 2:
            raise ValueError("max_refinements, initial_panels and gl_points must be positive")


# breakpoints(level, prefix) -> (B, nb) price levels for the date ``level``
BreakpointFn = Callable[[int, np.ndarray], np.ndarray]


def _rule(lo: float, hi: float, cuts: np.ndarray, panels: int, gl: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of shape (B, M) on [lo, hi] split at each row's cuts."""
    B = cuts.shape[0]
    edges = np.concatenate([np.full((B, 1), lo), np.clip(cuts, lo, hi), np.full((B, 1), hi)], axis=1)
    edges.sort(axis=1)
    a, b = edges[:, :-1, None], edges[:, 1:, None]
    x, w = leggauss(gl)
    frac = ((np.arange(panels)[:, None] + 0.5 * (x + 1.0)) / panels).ravel()
    wt = np.tile(w, panels) / (2.0 * panels)
    nodes = a + (b - a) * frac
    weights = (b - a) * wt
    return nodes.reshape(B, -1), weights.reshape(B, -1)


class _Nest:
    def __init__(self, payoff, x, t, dates, params, cfg, breakpoints, growth):
        self.payoff = payoff
        self.x = x
        self.steps = np.diff(np.concatenate([[t], dates]))
        self.params = params
        self.cfg = cfg
        self.breakpoints = breakpoints
        self.growth = growth

    def level(self, j: int, prefix: np.ndarray, panels: int) -> np.ndarray:
        depth = self.steps.size
        if j == depth:
            return np.asarray(self.payoff(prefix), dtype=float).reshape(prefix.shape[0])
        B = prefix.shape[0]
        per = panels * self.cfg.gl_points * (2 if self.breakpoints is not None else 1)
        rows = max(1, _CHUNK // per ** (depth - j))
        if B > rows:
            return np.concatenate([self.level(j, prefix[i : i + rows], panels) for i in range(0, B, rows)])
        dt = self.steps[j]
        vol = self.params.sigma * math.sqrt(dt)
        drift = self.params.log_drift * dt
        x_prev = prefix[:, -1] if j else np.full(B, self.x)
        center = self.growth * vol
        half = self.cfg.integration_half_width
        if self.breakpoints is None:
            cuts = np.empty((B, 0))
        else:
            levels = np.asarray(self.breakpoints(j, prefix), dtype=float).reshape(B, -1)
            with np.errstate(divide="ignore", invalid="ignore"):
                cuts = (np.log(levels / x_prev[:, None]) - drift) / vol
            cuts = np.nan_to_num(cuts, nan=center - half, posinf=center + half, neginf=center - half)
        z, w = _rule(center - half, center + half, cuts, panels, self.cfg.gl_points)
        w = w * np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        xs = x_prev[:, None] * np.exp(drift + vol * z)
        M = z.shape[1]
        nxt = np.concatenate([np.repeat(prefix, M, axis=0), xs.reshape(-1, 1)], axis=1)
        vals = self.level(j + 1, nxt, panels).reshape(B, M)
        return np.einsum("bm,bm->b", w, vals)

    def nodes(self, panels: int) -> int:
        per = panels * self.cfg.gl_points * (2 if self.breakpoints is not None else 1)
        return per**self.steps.size


def _diag(nest: _Nest, panels: int, it: int, change: float) -> dict[str, float]:
    return {"panels": float(panels), "nodes": float(nest.nodes(panels)), "refinements": float(it), "last_change": change}


def _refine(nest: _Nest, cfg: QuadratureConfig, discount: float) -> PriceResult:
    panels = cfg.initial_panels
    prev = None
    for it in range(cfg.max_refinements + 1):
        est = discount * float(nest.level(0, np.empty((1, 0)), panels)[0])
        if not math.isfinite(est):
            raise QuadratureError("non-finite quadrature estimate", (prev or math.nan, est))
        if prev is not None and abs(est - prev) <= cfg.rel_tol * max(abs(est), 1e-300):
            return PriceResult(est, _diag(nest, panels, it, abs(est - prev)))
        if est == 0.0 and prev == 0.0:
            return PriceResult(0.0, _diag(nest, panels, it, 0.0))
        if it == cfg.max_refinements or nest.nodes(2 * panels) > cfg.max_nodes:
            break
        prev = est
        panels *= 2
    raise QuadratureError("quadrature did not converge within max_refinements", (prev if prev is not None else math.nan, est))


def greens_price(
    payoff: Callable[[np.ndarray], np.ndarray],
    x: float,
    tau: float,
    params: MarketParams,
    cfg: QuadratureConfig = QuadratureConfig(),
    breakpoints: Sequence[float] = (),
    growth: float = 0.0,
) -> PriceResult:
    """``e^{-r tau} E[payoff(X_tau)]`` with ``X_0 = x``.

    ``payoff`` must accept a numpy array of terminal prices.  ``growth`` is
    the power the payoff grows like and shifts the integration window.
    """
    x = check_spot(x)
    if not tau > 0.0:
        raise ValueError(f"tau must be > 0, got {tau!r}")
    cuts = np.asarray([b for b in breakpoints if b > 0.0], dtype=float)
    bp = (lambda j, prefix: np.broadcast_to(cuts, (prefix.shape[0], cuts.size))) if cuts.size else None
    nest = _Nest(lambda p: payoff(p[:, 0]), x, 0.0, np.array([tau]), params, cfg, bp, growth)
    return _refine(nest, cfg, math.exp(-params.r * tau))


def nested_greens_price(
    payoff: Callable[[np.ndarray], np.ndarray],
    x: float,
    t: float,
    dates: Sequence[float],
    params: MarketParams,
    cfg: QuadratureConfig = QuadratureConfig(rel_tol=1e-7),
    breakpoints: BreakpointFn | None = None,
    growth: float = 0.0,
) -> PriceResult:
    """``e^{-r (T_last - t)} E[payoff(X_{T_1}, ..., X_{T_d})]`` by backward composition.

    ``payoff`` receives an array of shape (B, d) of prices at ``dates``.
    ``breakpoints(j, prefix)`` returns, for each row of ``prefix`` (prices at
    the first ``j`` dates), the price levels at date ``j`` where the
    integrand is not smooth.
    """
    x = check_spot(x)
    dates = np.asarray(dates, dtype=float)
    if dates.size == 0:
        raise ValueError("need at least one date")
    if dates.size > MAX_NESTING:
        raise ValueError(f"nesting too deep: {dates.size} dates > {MAX_NESTING}")
    if dates[0] <= t or np.any(np.diff(dates) <= 0.0):
        raise ValueError(f"dates must be strictly increasing and after t={t!r}, got {dates.tolist()}")
    nest = _Nest(payoff, x, t, dates, params, cfg, breakpoints, growth)
    return _refine(nest, cfg, math.exp(-params.r * (dates[-1] - t)))
