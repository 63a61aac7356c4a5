"""Closed-form R-profiles on hZ and on q-power scales.

Both bypass the generic IVP solver and serve as oracles for it.

On hZ the regressive factor 1 + h r is -1, so

    R(a + kh) = (-1)^k R0 + sum_{i<k} (-1)^(k-i-1) (p - 2h q_x - h^2 P_xx)(a + ih).

On q^k the factor is -q, e_r(t, a) is a product of (-q) and

    R(t_k) = (-q)^k [R0 + sum_{j<k} (1-q) t_j / (q (-q)^j) * s(t_j)],
    s(t)   = q p(t) / (t (q-1)) - 2q q_x(t, 0) - q (q-1) t P_xx(t, 0).
"""

from __future__ import annotations

import numpy as np

from timescale_lagrangian.errors import GridConfigError
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid

from .ingredients import Extremal, IngredientBundle, sample_ingredients, validate_ingredients
from .lagrangian import LagrangianForm, make_form


def closed_form_hz(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    extremal: Extremal | None = None,
) -> LagrangianForm:
    h = grid.uniform_step()
    if h is None:
        raise GridConfigError("the hZ closed form needs a uniformly spaced grid")

    samples = sample_ingredients(grid, ingredients)
    validate_ingredients(grid, samples)
    n = grid.kappa2_size
    forcing = samples.p - 2.0 * h * samples.q_x[:n] - h * h * samples.P_xx[:n]

    R = np.empty(grid.kappa_size)
    for k in range(grid.kappa_size):
        signs = np.array([(-1.0) ** (k - i - 1) for i in range(k)])
        R[k] = (-1.0) ** k * ingredients.R0 + float(np.dot(signs, forcing[:k]))

    offset = ingredients.C + h * np.concatenate(([0.0], np.cumsum(samples.P_x)))
    return make_form(
        grid,
        ingredients,
        extremal or Extremal.zero(),
        GridFunction(grid, offset),
        GridFunction(grid, R),
        samples,
    )


def closed_form_q(
    grid: TimeScaleGrid,
    ingredients: IngredientBundle,
    extremal: Extremal | None = None,
) -> LagrangianForm:
    q = grid.power_ratio()
    if q is None:
        raise GridConfigError("the q-scale closed form needs a geometric grid q^k")

    samples = sample_ingredients(grid, ingredients)
    validate_ingredients(grid, samples)
    n = grid.kappa2_size
    t = grid.points
    tk = t[:n]
    s = (
        q * samples.p / (tk * (q - 1.0))
        - 2.0 * q * samples.q_x[:n]
        - q * (q - 1.0) * tk * samples.P_xx[:n]
    )
    weights = np.array([(1.0 - q) * t[j] / (q * (-q) ** j) for j in range(n)])

    R = np.empty(grid.kappa_size)
    for k in range(grid.kappa_size):
        R[k] = (-q) ** k * (ingredients.R0 + float(np.dot(weights[:k], s[:k])))

    offset = ingredients.C + (q - 1.0) * np.concatenate(
        ([0.0], np.cumsum(t[: grid.kappa_size] * samples.P_x))
    )
    return make_form(
        grid,
        ingredients,
        extremal or Extremal.zero(),
        GridFunction(grid, offset),
        GridFunction(grid, R),
        samples,
    )


__all__ = ["closed_form_hz", "closed_form_q"]
