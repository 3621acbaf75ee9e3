from .montecarlo import McConfig, mc_price
from .quadrature import MAX_NESTING, QuadratureConfig, QuadratureError, greens_price, nested_greens_price
from .routing import UnsupportedContract, quad_price

__all__ = [
    "McConfig",
    "mc_price",
    "MAX_NESTING",
    "QuadratureConfig",
    "QuadratureError",
    "greens_price",
    "nested_greens_price",
    "UnsupportedContract",
    "quad_price",
]
