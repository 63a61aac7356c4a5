"""Inverse problem: Lagrangians synthesized from arbitrary ingredients and an extremal."""

from .closed_form import closed_form_hz, closed_form_q
from .ingredients import Extremal, IngredientBundle, sample_ingredients, validate_ingredients
from .lagrangian import (
    LagrangianForm,
    RSCoefficients,
    assemble_lagrangian,
    build_offsetQ,
    legendre_identity_residual,
    literal_general_form,
    r_coefficient,
    regressivity_factors,
    rs_coefficients,
    solve_R_profile,
)

__all__ = [
    "Extremal",
    "IngredientBundle",
    "LagrangianForm",
    "RSCoefficients",
    "assemble_lagrangian",
    "build_offsetQ",
    "closed_form_hz",
    "closed_form_q",
    "legendre_identity_residual",
    "literal_general_form",
    "r_coefficient",
    "regressivity_factors",
    "rs_coefficients",
    "sample_ingredients",
    "solve_R_profile",
    "validate_ingredients",
]
