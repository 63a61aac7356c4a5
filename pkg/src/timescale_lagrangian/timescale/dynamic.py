"""Regressivity, the time-scale exponential and first-order delta dynamic IVPs.

On an isolated grid y^Delta = p y + f is the explicit recurrence

    y(sigma(t)) = y(t) + mu(t) (p(t) y(t) + f(t)),

which is the reference solver. The variation-of-constants representation and
its factored variant are kept as independent cross-checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from timescale_lagrangian.errors import GridDomainError, RegressivityError

from .grid import GridFunction, TimeScaleGrid


logger = logging.getLogger(__name__)

IvpMethod = Literal["recurrence", "var_of_constants", "factored"]
IVP_METHODS: tuple[IvpMethod, ...] = ("recurrence", "var_of_constants", "factored")

CoefficientLike = GridFunction | float | Callable[[float], float] | np.ndarray


def _regressive_factors(p: GridFunction) -> np.ndarray:
    size = min(len(p), p.grid.kappa_size)
    return 1.0 + p.grid.mu_values[:size] * p.values[:size]


def is_regressive(p: GridFunction) -> bool:
    """True iff 1 + mu(t) p(t) != 0 at every kappa-point where p is defined."""
    return bool(np.all(_regressive_factors(p) != 0.0))


def _require_regressive(p: GridFunction, label: str = "p") -> np.ndarray:
    factors = _regressive_factors(p)
    zeros = np.flatnonzero(factors == 0.0)
    if zeros.size:
        t_bad = float(p.grid.points[zeros[0]])
        raise RegressivityError(f"{label} is not regressive: 1 + mu(t) {label}(t) = 0 at t={t_bad!r}")
    return factors


def exp_ts(p: GridFunction, t: float, t0: float) -> float:
    """e_p(t, t0) as a product of (1 + mu p) factors over [t0, t)."""

    factors = _require_regressive(p)
    grid = p.grid
    i = grid.index_of(t)
    i0 = grid.index_of(t0)
    lo, hi = min(i, i0), max(i, i0)
    if hi > factors.size:
        raise GridDomainError(f"p is not defined on [{float(grid.points[lo])!r}, {float(grid.points[hi])!r})")
    product = float(np.prod(factors[lo:hi]))
    return product if i >= i0 else 1.0 / product


def exp_ts_values(p: GridFunction, t0: float | None = None) -> GridFunction:
    """e_p(t, t0) at every point where it is defined (one point past p)."""

    factors = _require_regressive(p)
    grid = p.grid
    i0 = 0 if t0 is None else grid.index_of(t0)
    if i0 > factors.size:
        raise GridDomainError(f"t0={t0!r} lies beyond the domain of p")
    out = np.empty(factors.size + 1)
    out[i0] = 1.0
    out[i0 + 1 :] = np.cumprod(factors[i0:])
    if i0 > 0:
        out[:i0] = 1.0 / np.cumprod(factors[:i0][::-1])[::-1]
    return GridFunction(grid, out)


def _as_kappa_function(grid: TimeScaleGrid, value: CoefficientLike, label: str) -> GridFunction:
    size = grid.kappa_size
    if isinstance(value, GridFunction):
        if value.grid is not grid:
            raise GridDomainError(f"{label} belongs to a different grid")
        return value.restrict(min(size, len(value)))
    if callable(value):
        return GridFunction.from_callable(grid, value, "kappa")
    array = np.asarray(value, dtype=float)
    if array.ndim == 0:
        return GridFunction.constant(grid, float(array), "kappa")
    return GridFunction(grid, array[:size])


@dataclass(frozen=True, eq=False)
class CoefficientPair:
    """Coefficient p and forcing f of y^Delta = p y + f.

    Both normally cover the kappa-domain. A shorter common prefix is allowed
    (the kappa^2-domain, say); the solution then stops one point past it.
    """

    p: GridFunction
    f: GridFunction

    def __post_init__(self) -> None:
        if self.p.grid is not self.f.grid:
            raise GridDomainError("p and f must live on the same grid")
        p = _as_kappa_function(self.p.grid, self.p, "p")
        f = _as_kappa_function(self.f.grid, self.f, "f")
        if len(p) != len(f):
            raise GridDomainError(f"p has {len(p)} values but f has {len(f)}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "f", f)
        _require_regressive(self.p)

    @property
    def grid(self) -> TimeScaleGrid:
        return self.p.grid

    @classmethod
    def from_values(
        cls,
        grid: TimeScaleGrid,
        p: CoefficientLike,
        f: CoefficientLike = 0.0,
    ) -> CoefficientPair:
        return cls(_as_kappa_function(grid, p, "p"), _as_kappa_function(grid, f, "f"))


def _solve_recurrence(pair: CoefficientPair, y0: float) -> np.ndarray:
    mu_vals = pair.grid.mu_values.tolist()
    p_vals = pair.p.values.tolist()
    f_vals = pair.f.values.tolist()
    y = [float(y0)]
    current = float(y0)
    for m, pk, fk in zip(mu_vals, p_vals, f_vals):
        current = current + m * (pk * current + fk)
        y.append(current)
    return np.array(y)


def _solve_var_of_constants(pair: CoefficientPair, y0: float) -> np.ndarray:
    # Quadratic in the grid size: every e_p(t, sigma(tau)) is its own product.
    factors = _regressive_factors(pair.p)
    forcing = pair.grid.mu_values[: factors.size] * pair.f.values
    n = factors.size
    y = np.empty(n + 1)
    y[0] = 1.0
    y[1:] = np.cumprod(factors)
    y *= float(y0)
    for j in range(n):
        transport = np.ones(n - j)
        transport[1:] = np.cumprod(factors[j + 1 :])
        y[j + 1 :] += forcing[j] * transport
    return y


def _solve_factored(pair: CoefficientPair, y0: float) -> np.ndarray:
    growth = exp_ts_values(pair.p).values
    forcing = pair.grid.mu_values[: growth.size - 1] * pair.f.values
    accumulated = np.concatenate(([0.0], np.cumsum(forcing / growth[1:])))
    return growth * (float(y0) + accumulated)


_SOLVERS: dict[str, Callable[[CoefficientPair, float], np.ndarray]] = {
    "recurrence": _solve_recurrence,
    "var_of_constants": _solve_var_of_constants,
    "factored": _solve_factored,
}


def solve_ivp(
    pair: CoefficientPair,
    t0: float,
    y0: float,
    method: IvpMethod = "recurrence",
) -> GridFunction:
    """Forward solve of y^Delta = p y + f, y(t0) = y0, with t0 the grid start."""

    grid = pair.grid
    if grid.index_of(t0) != 0:
        raise GridDomainError(f"forward solves start at a={grid.a!r}, got t0={t0!r}")
    try:
        solver = _SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown IVP method {method!r}; choose from {IVP_METHODS}") from None
    logger.debug("solving IVP on %d points with method=%s", len(grid), method)
    return GridFunction(grid, solver(pair, y0))


__all__ = [
    "CoefficientPair",
    "IVP_METHODS",
    "IvpMethod",
    "exp_ts",
    "exp_ts_values",
    "is_regressive",
    "solve_ivp",
]
