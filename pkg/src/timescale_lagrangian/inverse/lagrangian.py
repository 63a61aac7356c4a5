"""Synthesis of Lagrangians with a prescribed extremal on an isolated time scale.

For the null extremal the synthesized integrand is

    L(t, x, v) = P(t, x) + [Q0(t) + q(t, x) - q(t, 0)] v
                 + 1/2 [R(t) + w(t, x, v) - w(t, 0, 0)] v^2,

    Q0(t) = C + integral over [a, t) of P_x(tau, 0),

and R solves

    R(t) + mu(t) {2 q_x(t, 0) + mu(t) P_xx(t, 0) + mu(sigma(t))^dagger R(sigma(t))} = p(t)

on the kappa^2-domain with R(a) = R0. Along the null extremal the
Euler-Lagrange integrand is then the constant C and the Legendre expression
equals p > 0. A nonzero extremal y0 is handled by composing with the shift
(x, v) -> (x - y0^sigma(t), v - y0^Delta(t)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from timescale_lagrangian.expr import HyperDual, eval2, eval2_at, evaluate
from timescale_lagrangian.timescale import (
    CoefficientPair,
    GridFunction,
    TimeScaleGrid,
    dagger_values,
    delta_antiderivative,
    solve_ivp,
)

from .ingredients import (
    Extremal,
    IngredientBundle,
    IngredientSamples,
    sample_ingredients,
    validate_ingredients,
)


logger = logging.getLogger(__name__)

RProfileMethod = Literal["recurrence", "closed", "remark"]
_IVP_METHOD = {"recurrence": "recurrence", "closed": "var_of_constants", "remark": "factored"}


@dataclass(frozen=True, eq=False)
class RSCoefficients:
    """r and s of the R-profile dynamic equation R^Delta = r R + s, on the kappa^2-domain."""

    r: GridFunction
    s: GridFunction


@dataclass(frozen=True, eq=False)
class LagrangianForm:
    """An evaluable synthesized Lagrangian.

    ``offsetQ`` covers the whole grid; ``Rprofile`` and the baselines cover
    the points a..rho(b), which is where the integrand is ever evaluated.
    """

    grid: TimeScaleGrid
    ingredients: IngredientBundle
    offsetQ: GridFunction
    Rprofile: GridFunction
    extremal: Extremal
    literal_general: bool
    shift_x: np.ndarray
    shift_v: np.ndarray
    q_baseline: np.ndarray
    w_baseline: np.ndarray

    def evaluate(self, index: int, x: float, v: float) -> HyperDual:
        """L at (t_index, x, v) with partials in (x, v) through order two."""

        t = float(self.grid.points[index])
        xs = HyperDual.seed_x(x - float(self.shift_x[index]))
        vs = HyperDual.seed_v(v - float(self.shift_v[index]))
        ing = self.ingredients
        slope = eval2_at(ing.q, t, xs, vs) + (float(self.offsetQ.values[index]) - float(self.q_baseline[index]))
        curvature = eval2_at(ing.w, t, xs, vs) + (
            float(self.Rprofile.values[index]) - float(self.w_baseline[index])
        )
        return eval2_at(ing.P, t, xs, vs) + slope * vs + 0.5 * curvature * vs * vs

    def value(self, index: int, x: float, v: float) -> float:
        return self.evaluate(index, x, v).value

    def at(self, t: float, x: float, v: float) -> HyperDual:
        return self.evaluate(self.grid.index_of(t), x, v)

    def extremal_values(self) -> GridFunction:
        return self.extremal.sample(self.grid)


def build_offsetQ(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    samples: IngredientSamples | None = None,
) -> GridFunction:
    """C plus the delta integral of P_x(., 0) from a, at every grid point."""

    samples = samples or sample_ingredients(grid, ingredients)
    return delta_antiderivative(GridFunction(grid, samples.P_x)) + ingredients.C


def _kappa2_weights(grid: TimeScaleGrid) -> tuple[np.ndarray, np.ndarray]:
    n = grid.kappa2_size
    mu_all = grid.mu_values
    return mu_all[:n], dagger_values(mu_all[1 : n + 1])


def r_coefficient(grid: TimeScaleGrid) -> GridFunction:
    """The ingredient-independent coefficient r on the kappa^2-domain."""

    mu_t, dag = _kappa2_weights(grid)
    return GridFunction(grid, -(1.0 + mu_t * dag) / (mu_t * mu_t * dag))


def rs_coefficients(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    samples: IngredientSamples | None = None,
) -> RSCoefficients:
    samples = samples or sample_ingredients(grid, ingredients)
    n = grid.kappa2_size
    mu_t, dag = _kappa2_weights(grid)
    s = (samples.p - mu_t * (2.0 * samples.q_x[:n] + mu_t * samples.P_xx[:n])) / (mu_t * mu_t * dag)
    return RSCoefficients(r_coefficient(grid), GridFunction(grid, s))


def regressivity_factors(coefficients: RSCoefficients) -> tuple[np.ndarray, np.ndarray]:
    """(1 + mu r, -mu(sigma(t)) / mu(t)) on the kappa^2-domain; the two agree."""

    grid = coefficients.r.grid
    n = len(coefficients.r)
    mu_all = grid.mu_values
    return 1.0 + mu_all[:n] * coefficients.r.values, -mu_all[1 : n + 1] / mu_all[:n]


def solve_R_profile(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    method: RProfileMethod = "recurrence",
    samples: IngredientSamples | None = None,
) -> GridFunction:
    """R(t, 0, 0) on the points a..rho(b), starting from R(a) = R0."""

    samples = samples or sample_ingredients(grid, ingredients)
    validate_ingredients(grid, samples)
    coefficients = rs_coefficients(grid, ingredients, samples)
    pair = CoefficientPair(coefficients.r, coefficients.s)
    return solve_ivp(pair, grid.a, ingredients.R0, _IVP_METHOD[method])  # type: ignore[arg-type]


def legendre_identity_residual(
    grid: TimeScaleGrid,
    samples: IngredientSamples,
    Rprofile: GridFunction,
) -> np.ndarray:
    """Left side of the R-profile identity minus p, on the kappa^2-domain."""

    n = grid.kappa2_size
    mu_all = grid.mu_values
    R = Rprofile.values
    dag = dagger_values(mu_all[1 : n + 1])
    lhs = R[:n] + mu_all[:n] * (
        2.0 * samples.q_x[:n] + mu_all[:n] * samples.P_xx[:n] + dag * R[1 : n + 1]
    )
    return lhs - samples.p


def make_form(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    extremal: Extremal,
    offsetQ: GridFunction,
    Rprofile: GridFunction,
    samples: IngredientSamples,
    *,
    literal_general: bool = False,
) -> LagrangianForm:
    size = grid.kappa_size
    if extremal.kind == "zero":
        shift_x = np.zeros(size)
        shift_v = np.zeros(size)
    else:
        shift_x, shift_v = extremal.shifts(grid)
    if literal_general:
        times = grid.points[:size].tolist()
        q_baseline = np.array([evaluate(ingredients.q, t, -sx) for t, sx in zip(times, shift_x)])
        w_baseline = np.array(
            [evaluate(ingredients.w, t, -sx, -sv) for t, sx, sv in zip(times, shift_x, shift_v)]
        )
    else:
        q_baseline = samples.q_0
        w_baseline = samples.w_0
    return LagrangianForm(
        grid=grid,
        ingredients=ingredients,
        offsetQ=offsetQ,
        Rprofile=Rprofile,
        extremal=extremal,
        literal_general=literal_general,
        shift_x=shift_x,
        shift_v=shift_v,
        q_baseline=q_baseline,
        w_baseline=w_baseline,
    )


def assemble_lagrangian(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    extremal: Extremal | None = None,
    *,
    method: RProfileMethod = "recurrence",
) -> LagrangianForm:
    """Synthesize L whose extremal is ``extremal`` (the null function by default)."""

    extremal = extremal or Extremal.zero()
    samples = sample_ingredients(grid, ingredients)
    Rprofile = solve_R_profile(grid, ingredients, method, samples)
    offsetQ = build_offsetQ(grid, ingredients, samples)
    logger.debug(
        "assembled Lagrangian on %d points (extremal=%s, method=%s)", len(grid), extremal.kind, method
    )
    return make_form(grid, ingredients, extremal, offsetQ, Rprofile, samples)


def literal_general_form(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    extremal: Extremal,
) -> LagrangianForm:
    """The general-extremal Lagrangian with baselines taken at -y0 instead of 0.

    The Q-offset integrates P_x(tau, -y0^sigma(tau)), and the q and w terms
    subtract q(t, -y0^sigma(t)) and w(t, -y0^sigma(t), -y0^Delta(t)). This
    form is kept for comparing Euler-Lagrange residuals against the shifted
    construction; it does not inherit its guarantees.
    """

    samples = sample_ingredients(grid, ingredients)
    Rprofile = solve_R_profile(grid, ingredients, "recurrence", samples)
    shift_x, _ = extremal.shifts(grid)
    times = grid.points[: grid.kappa_size].tolist()
    P_x_shifted = np.array([eval2(ingredients.P, t, -sx, 0.0).d_x for t, sx in zip(times, shift_x)])
    offsetQ = delta_antiderivative(GridFunction(grid, P_x_shifted)) + ingredients.C
    return make_form(grid, ingredients, extremal, offsetQ, Rprofile, samples, literal_general=True)


__all__ = [
    "LagrangianForm",
    "RProfileMethod",
    "RSCoefficients",
    "assemble_lagrangian",
    "build_offsetQ",
    "legendre_identity_residual",
    "literal_general_form",
    "make_form",
    "r_coefficient",
    "regressivity_factors",
    "rs_coefficients",
    "solve_R_profile",
]
