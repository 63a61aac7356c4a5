"""Ingredient expressions and second-order forward differentiation."""

from .hyperdual import HyperDual
from .parser import (
    Expr,
    eval2,
    eval2_at,
    evaluate,
    free_variables,
    parse,
    to_source,
    validate_arity,
)

__all__ = [
    "Expr",
    "HyperDual",
    "eval2",
    "eval2_at",
    "evaluate",
    "free_variables",
    "parse",
    "to_source",
    "validate_arity",
]
