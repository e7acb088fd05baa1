"""Exact OPE calculus for vertex superalgebras."""

from .coeff import DivergesError, K, ONE, PoleError, Scalar, ZERO, parse_scalar, sc
from .fields import Algebra, EngineError, FieldExpr, Generator

__all__ = [
    "Algebra",
    "DivergesError",
    "EngineError",
    "FieldExpr",
    "Generator",
    "K",
    "ONE",
    "PoleError",
    "Scalar",
    "ZERO",
    "parse_scalar",
    "sc",
]
