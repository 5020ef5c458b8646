"""Numerical laboratory for weighted Bergman projections on the punctured disk,
the Hartogs triangle and the upper half plane."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AnalyticNonintegrable,
    BergmanLabError,
    DivergentIntegral,
    DomainError,
    InvalidArgument,
    NearSingular,
    QuadratureError,
    UnsupportedCase,
)
from .quadrature import QuadratureSpec  # noqa: E402
from .ranges import PRange, decompose_exponent, range_disk_star, range_hartogs  # noqa: E402

__all__ = [
    "AnalyticNonintegrable",
    "BergmanLabError",
    "DivergentIntegral",
    "DomainError",
    "InvalidArgument",
    "NearSingular",
    "PRange",
    "QuadratureError",
    "QuadratureSpec",
    "UnsupportedCase",
    "__version__",
    "decompose_exponent",
    "range_disk_star",
    "range_hartogs",
]
