from .asian import (
    AsianCoefficients,
    AsianState,
    ContAsianFixedSpec,
    ContAsianFloatingSpec,
    GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
    continuous_geo_asian_fixed_price,
    continuous_geo_asian_floating_price,
    discrete_geo_asian_fixed_price,
    discrete_geo_asian_floating_price,
    fixed_strike_coefficients,
    floating_strike_coefficients,
)
from .convergence import CSV_HEADER, ConvergenceRow, convergence_study
from .savings import SavingsPlanSpec, savings_plan_by_binaries, savings_plan_payoff, savings_plan_price

__all__ = [
    "AsianCoefficients",
    "AsianState",
    "ContAsianFixedSpec",
    "ContAsianFloatingSpec",
    "GeoAsianFixedSpec",
    "GeoAsianFloatingSpec",
    "continuous_geo_asian_fixed_price",
    "continuous_geo_asian_floating_price",
    "discrete_geo_asian_fixed_price",
    "discrete_geo_asian_floating_price",
    "fixed_strike_coefficients",
    "floating_strike_coefficients",
    "CSV_HEADER",
    "ConvergenceRow",
    "convergence_study",
    "SavingsPlanSpec",
    "savings_plan_by_binaries",
    "savings_plan_payoff",
    "savings_plan_price",
]
