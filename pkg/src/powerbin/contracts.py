"""Tagged union of every priced contract and closed-form dispatch by kind."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .binaries import PowerBinarySpec, binary_price, power_standard_price
from .core import MarketParams, PriceResult
from .normdist import NormDistPayoffSpec, normdist_price
from .products.asian import (
    AsianState,
    ContAsianFixedSpec,
    ContAsianFloatingSpec,
    GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
    continuous_geo_asian_fixed_price,
    continuous_geo_asian_floating_price,
    discrete_geo_asian_fixed_price,
    discrete_geo_asian_floating_price,
)
from .products.savings import SavingsPlanSpec, savings_plan_price


@dataclass(frozen=True)
class PowerStandardSpec:
    alpha: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.T)):
            raise ValueError("alpha and T must be finite")


@dataclass(frozen=True)
class NormDistContract:
    payoff: NormDistPayoffSpec
    T: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.T):
            raise ValueError("T must be finite")


ContractSpec = Union[
    PowerStandardSpec,
    PowerBinarySpec,
    NormDistContract,
    SavingsPlanSpec,
    GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
    ContAsianFixedSpec,
    ContAsianFloatingSpec,
]

KINDS = {
    PowerStandardSpec: "power_standard",
    PowerBinarySpec: "power_binary",
    NormDistContract: "normdist",
    SavingsPlanSpec: "savings_plan",
    GeoAsianFixedSpec: "geo_asian_fixed",
    GeoAsianFloatingSpec: "geo_asian_floating",
    ContAsianFixedSpec: "cont_asian_fixed",
    ContAsianFloatingSpec: "cont_asian_floating",
}


def kind_of(contract: ContractSpec) -> str:
    try:
        return KINDS[type(contract)]
    except KeyError:
        raise TypeError(f"unsupported contract type {type(contract).__name__}") from None


def expiry_of(contract: ContractSpec) -> float:
    if isinstance(contract, PowerBinarySpec):
        return contract.expiries[-1]
    if isinstance(contract, (GeoAsianFixedSpec, GeoAsianFloatingSpec)):
        return contract.schedule.expiry
    return contract.T


def _normdist(c: NormDistContract, x, t, params, J):
    return normdist_price(x, c.T - t, c.payoff, params)


def _cont_fixed(c: ContAsianFixedSpec, x, t, params, J):
    return continuous_geo_asian_fixed_price(x, AsianState(_need_j(J, t), t), c.K, c.T, params)


def _cont_floating(c: ContAsianFloatingSpec, x, t, params, J):
    return continuous_geo_asian_floating_price(x, AsianState(_need_j(J, t), t), c.T, params)


def _need_j(J: float | None, t: float) -> float:
    if J is None:
        if t == 0.0:
            return 1.0
        raise ValueError("continuous Asian valued after inception needs the running average J")
    return J


# kind -> closed form; a plain dict so tests can substitute a corrupted entry
CLOSED_FORMS: dict[str, Callable[..., PriceResult]] = {
    "power_standard": lambda c, x, t, params, J: power_standard_price(x, t, c.T, c.alpha, params),
    "power_binary": lambda c, x, t, params, J: binary_price(x, t, c, params),
    "normdist": _normdist,
    "savings_plan": lambda c, x, t, params, J: savings_plan_price(x, t, c),
    "geo_asian_fixed": lambda c, x, t, params, J: discrete_geo_asian_fixed_price(x, t, c, params),
    "geo_asian_floating": lambda c, x, t, params, J: discrete_geo_asian_floating_price(x, t, c, params),
    "cont_asian_fixed": _cont_fixed,
    "cont_asian_floating": _cont_floating,
}


def closed_form_price(
    contract: ContractSpec, x: float, t: float, params: MarketParams | None, J: float | None = None
) -> PriceResult:
    """Closed-form value; ``params`` is ignored for the savings plan."""
    return CLOSED_FORMS[kind_of(contract)](contract, x, t, params, J)
