"""Verification of Euler-Lagrange and Legendre conditions along trajectories."""

from .checks import (
    Evaluable,
    ExpressionLagrangian,
    VariationalProblem,
    VerificationReport,
    c1rd_norm,
    el_residual,
    evaluate_functional,
    functional_gradient,
    functional_gradient_fd,
    legendre_lhs,
    perturbation_sample,
    render_comparison,
    render_report,
    stationarity_gradient,
    stationarity_gradient_fd,
    verify,
)

__all__ = [
    "Evaluable",
    "ExpressionLagrangian",
    "VariationalProblem",
    "VerificationReport",
    "c1rd_norm",
    "el_residual",
    "evaluate_functional",
    "functional_gradient",
    "functional_gradient_fd",
    "legendre_lhs",
    "perturbation_sample",
    "render_comparison",
    "render_report",
    "stationarity_gradient",
    "stationarity_gradient_fd",
    "verify",
]
