"""Closed-form Black-Scholes prices for power binaries, higher-order binaries,
geometric Asians and an FX savings plan, with quadrature and Monte Carlo
oracles to check them."""

from .binaries import (
    GeneralBinaryCondition,
    PowerBinarySpec,
    binary_price,
    nth_order_binary_price,
    power_binary_price,
    power_standard_price,
    reduce_general_condition,
    second_order_binary_price,
)
from .contracts import CLOSED_FORMS, NormDistContract, PowerStandardSpec, closed_form_price
from .core import (
    FixedObservations,
    Horizon,
    MarketParams,
    MonitoringSchedule,
    PriceResult,
    Sign,
    d_arg,
    delta_arg,
    mu,
)
from .gaussian import CorrelationStructure, binorm_cdf, markov_correlation, markov_orthant_cdf, mvn_cdf, norm_cdf
from .normdist import NormDistPayoffSpec, normdist_price
from .products import (
    AsianState,
    ContAsianFixedSpec,
    ContAsianFloatingSpec,
    GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
    SavingsPlanSpec,
    continuous_geo_asian_fixed_price,
    continuous_geo_asian_floating_price,
    convergence_study,
    discrete_geo_asian_fixed_price,
    discrete_geo_asian_floating_price,
    savings_plan_price,
)

__all__ = [
    "GeneralBinaryCondition",
    "PowerBinarySpec",
    "binary_price",
    "nth_order_binary_price",
    "power_binary_price",
    "power_standard_price",
    "reduce_general_condition",
    "second_order_binary_price",
    "CLOSED_FORMS",
    "NormDistContract",
    "PowerStandardSpec",
    "closed_form_price",
    "FixedObservations",
    "Horizon",
    "MarketParams",
    "MonitoringSchedule",
    "PriceResult",
    "Sign",
    "d_arg",
    "delta_arg",
    "mu",
    "CorrelationStructure",
    "binorm_cdf",
    "markov_correlation",
    "markov_orthant_cdf",
    "mvn_cdf",
    "norm_cdf",
    "NormDistPayoffSpec",
    "normdist_price",
    "AsianState",
    "ContAsianFixedSpec",
    "ContAsianFloatingSpec",
    "GeoAsianFixedSpec",
    "GeoAsianFloatingSpec",
    "SavingsPlanSpec",
    "continuous_geo_asian_fixed_price",
    "continuous_geo_asian_floating_price",
    "convergence_study",
    "discrete_geo_asian_fixed_price",
    "discrete_geo_asian_floating_price",
    "savings_plan_price",
]
