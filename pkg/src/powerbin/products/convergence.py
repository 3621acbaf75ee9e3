"""Discrete-to-continuous convergence of geometric Asian prices at t = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..core import FixedObservations, MarketParams, MonitoringSchedule
from .asian import (
    AsianState,
    GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
    continuous_geo_asian_fixed_price,
    continuous_geo_asian_floating_price,
    discrete_geo_asian_fixed_price,
    discrete_geo_asian_floating_price,
)

CSV_HEADER = ("n", "V_n", "V_continuous", "abs_error", "rel_error", "error_ratio_vs_prev")


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    V_n: float
    V_continuous: float
    abs_error: float
    rel_error: float
    error_ratio_vs_prev: float | None


def continuous_limit(kind: str, X: float, params: MarketParams, K: float, T: float) -> float:
    state = AsianState(X, 0.0)
    if kind == "fixed":
        return continuous_geo_asian_fixed_price(X, state, K, T, params).value
    if kind == "floating":
        return continuous_geo_asian_floating_price(X, state, T, params).value
    raise ValueError(f"kind must be 'fixed' or 'floating', got {kind!r}")


def discrete_value(kind: str, n: int, X: float, params: MarketParams, K: float, T: float) -> float:
    """n equally spaced closes on [0, T], the first one taken now at ``X``."""
    schedule = MonitoringSchedule.equally_spaced(n, T)
    fixings = FixedObservations((X,))
    if kind == "fixed":
        return discrete_geo_asian_fixed_price(X, 0.0, GeoAsianFixedSpec(schedule, K, fixings), params).value
    if kind == "floating":
        return discrete_geo_asian_floating_price(X, 0.0, GeoAsianFloatingSpec(schedule, fixings), params).value
    raise ValueError(f"kind must be 'fixed' or 'floating', got {kind!r}")


def convergence_study(
    kind: str,
    ladder: Sequence[int],
    X: float,
    params: MarketParams,
    K: float = 100.0,
    T: float = 1.0,
) -> list[ConvergenceRow]:
    ladder = [int(n) for n in ladder]
    if not ladder:
        raise ValueError("ladder is empty")
    if any(n < 2 for n in ladder):
        raise ValueError(f"ladder entries must be >= 2, got {ladder}")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder must be strictly ascending, got {ladder}")
    v_inf = continuous_limit(kind, X, params, K, T)
    rows: list[ConvergenceRow] = []
    prev_err = None
    for n in ladder:
        v_n = discrete_value(kind, n, X, params, K, T)
        err = abs(v_n - v_inf)
        rel = err / abs(v_inf) if v_inf != 0.0 else math.inf
        ratio = err / prev_err if prev_err else None
        rows.append(ConvergenceRow(n, v_n, v_inf, err, rel, ratio))
        prev_err = err
    return rows
