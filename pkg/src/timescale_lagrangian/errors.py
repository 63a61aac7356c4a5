"""Exception hierarchy shared by the time-scale, expression and inverse modules."""

from __future__ import annotations

from typing import Iterable


class LagrangianError(Exception):
    """Base class for every error raised by this package."""


class GridDomainError(LagrangianError, ValueError):
    """Raised when a point or interval does not lie on the working grid."""


class GridConfigError(LagrangianError, ValueError):
    """Raised when a grid specification does not describe an admissible grid."""


class ExpressionSyntaxError(LagrangianError, ValueError):
    """Raised when an ingredient expression cannot be parsed."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownIdentifierError(ExpressionSyntaxError):
    """Raised for identifiers outside the expression grammar."""

    def __init__(self, name: str, position: int) -> None:
        super().__init__(f'unknown identifier "{name}"', position)
        self.name = name


class ArityError(LagrangianError, ValueError):
    """Raised when an expression uses variables it is not allowed to depend on."""

    def __init__(self, variables: Iterable[str], *, label: str = "expression") -> None:
        self.variables = tuple(sorted(set(variables)))
        joined = ", ".join(self.variables)
        super().__init__(f"{label} may not depend on {{{joined}}}")


class ExpressionEvaluationError(LagrangianError, ArithmeticError):
    """Raised when an expression is undefined at the evaluation point."""

    def __init__(self, message: str, node: str) -> None:
        super().__init__(f"{message} in {node!r}")
        self.node = node


class RegressivityError(LagrangianError, ValueError):
    """Raised when 1 + mu(t) p(t) vanishes at some grid point."""


class IngredientValidationError(LagrangianError, ValueError):
    """Raised when an ingredient bundle violates a construction requirement."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class BoundaryMismatchError(LagrangianError, ValueError):
    """Raised when a trajectory does not meet the prescribed boundary values."""


class BundleFormatError(LagrangianError, ValueError):
    """Raised when a stored Lagrangian bundle or trajectory file is malformed."""


__all__ = [
    "ArityError",
    "BoundaryMismatchError",
    "BundleFormatError",
    "ExpressionEvaluationError",
    "ExpressionSyntaxError",
    "GridConfigError",
    "GridDomainError",
    "IngredientValidationError",
    "LagrangianError",
    "RegressivityError",
    "UnknownIdentifierError",
]
