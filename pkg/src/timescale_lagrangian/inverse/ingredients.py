"""Arbitrary construction data: the functions P, p, q, w, the constants C and R0, and the extremal."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from timescale_lagrangian.errors import ExpressionEvaluationError, IngredientValidationError
from timescale_lagrangian.expr import Expr, eval2, evaluate, parse, to_source, validate_arity
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid, delta_derivative


INGREDIENT_ARITY: dict[str, tuple[str, ...]] = {
    "P": ("t", "x"),
    "p": ("t",),
    "q": ("t", "x"),
    "w": ("t", "x", "v"),
}


@dataclass(frozen=True, eq=False)
class IngredientBundle:
    """Parsed ingredients together with the source text they came from."""

    P: Expr
    p: Expr
    q: Expr
    w: Expr
    C: float = 0.0
    R0: float = 0.0
    sources: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_sources(
        cls,
        *,
        P: str = "0",
        p: str = "1",
        q: str = "0",
        w: str = "0",
        C: float = 0.0,
        R0: float = 0.0,
    ) -> IngredientBundle:
        texts = {"P": P, "p": p, "q": q, "w": w}
        trees: dict[str, Expr] = {}
        for name, text in texts.items():
            tree = parse(text)
            validate_arity(tree, INGREDIENT_ARITY[name], label=name)
            trees[name] = tree
        return cls(C=float(C), R0=float(R0), sources=texts, **trees)

    def to_sources(self) -> dict[str, str | float]:
        texts = {
            name: self.sources.get(name) or to_source(getattr(self, name))
            for name in INGREDIENT_ARITY
        }
        return {**texts, "C": self.C, "R0": self.R0}


@dataclass(frozen=True, eq=False)
class IngredientSamples:
    """Ingredient partials at x = 0 (and v = 0) sampled on the kappa-domain.

    ``p`` is sampled on the kappa^2-domain only, where the Legendre
    identity is imposed.
    """

    P_x: np.ndarray
    P_xx: np.ndarray
    q_x: np.ndarray
    q_0: np.ndarray
    w_0: np.ndarray
    p: np.ndarray


def sample_ingredients(grid: TimeScaleGrid, ingredients: IngredientBundle) -> IngredientSamples:
    times = grid.points[: grid.kappa_size].tolist()
    P_x, P_xx, q_x, q_0, w_0 = [], [], [], [], []
    for t in times:
        P_dual = eval2(ingredients.P, t, 0.0, 0.0)
        q_dual = eval2(ingredients.q, t, 0.0, 0.0)
        P_x.append(P_dual.d_x)
        P_xx.append(P_dual.d_xx)
        q_x.append(q_dual.d_x)
        q_0.append(q_dual.value)
        w_0.append(evaluate(ingredients.w, t, 0.0, 0.0))
    p = [evaluate(ingredients.p, t) for t in times[: grid.kappa2_size]]
    samples = IngredientSamples(
        P_x=np.array(P_x),
        P_xx=np.array(P_xx),
        q_x=np.array(q_x),
        q_0=np.array(q_0),
        w_0=np.array(w_0),
        p=np.array(p),
    )
    _require_finite(times, ingredients, samples)
    return samples


_SAMPLE_SOURCES = {"P_x": "P", "P_xx": "P", "q_x": "q", "q_0": "q", "w_0": "w", "p": "p"}


def _require_finite(times: list[float], ingredients: IngredientBundle, samples: IngredientSamples) -> None:
    for attribute, name in _SAMPLE_SOURCES.items():
        values = getattr(samples, attribute)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            i = int(bad[0])
            raise ExpressionEvaluationError(
                f"ingredient {name} is not finite at t={times[i]!r} ({attribute} = {float(values[i])!r})",
                to_source(getattr(ingredients, name)),
            )


def validate_ingredients(grid: TimeScaleGrid, samples: IngredientSamples) -> None:
    """p(t) > 0 is required on the whole kappa^2-domain."""

    bad = np.flatnonzero(~(samples.p > 0))
    if bad.size:
        i = int(bad[0])
        raise IngredientValidationError(
            "p",
            f"p(t) > 0 is required on [a,b]^kappa2 but p({float(grid.points[i])!r}) = {float(samples.p[i])!r}",
        )


ExtremalKind = Literal["zero", "expr", "values"]


@dataclass(frozen=True, eq=False)
class Extremal:
    """The prescribed extremal y0: identically zero, sampled values, or an expression in t."""

    kind: ExtremalKind = "zero"
    values: tuple[float, ...] | None = None
    source: str | None = None

    @classmethod
    def zero(cls) -> Extremal:
        return cls()

    @classmethod
    def from_values(cls, values: GridFunction | np.ndarray | list[float]) -> Extremal:
        data = values.values if isinstance(values, GridFunction) else np.asarray(values, dtype=float)
        return cls("values", tuple(float(y) for y in data))

    @classmethod
    def from_expression(cls, source: str) -> Extremal:
        validate_arity(parse(source), ("t",), label="extremal")
        return cls("expr", source=source)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (
            self.kind == "values" and self.values is not None and not any(self.values)
        )

    def sample(self, grid: TimeScaleGrid) -> GridFunction:
        if self.kind == "zero":
            return GridFunction.constant(grid, 0.0)
        if self.kind == "values":
            assert self.values is not None
            if len(self.values) != len(grid):
                raise IngredientValidationError(
                    "extremal",
                    f"{len(self.values)} values given for a grid of {len(grid)} points",
                )
            return GridFunction(grid, np.array(self.values))
        assert self.source is not None
        tree = parse(self.source)
        return GridFunction.from_callable(grid, lambda t: evaluate(tree, t))

    def shifts(self, grid: TimeScaleGrid) -> tuple[np.ndarray, np.ndarray]:
        """(y0^sigma, y0^Delta) on the kappa-domain."""

        y0 = self.sample(grid)
        return y0.values[1:].copy(), delta_derivative(y0).values.copy()


__all__ = [
    "INGREDIENT_ARITY",
    "Extremal",
    "IngredientBundle",
    "IngredientSamples",
    "sample_ingredients",
    "validate_ingredients",
]
