"""Isolated time scales: grids, delta calculus and dynamic equations."""

from .dynamic import CoefficientPair, exp_ts, exp_ts_values, is_regressive, solve_ivp
from .grid import (
    GridFunction,
    GridSpec,
    TimeScaleGrid,
    build_grid,
    dagger,
    dagger_values,
    delta_antiderivative,
    delta_derivative,
    delta_integral,
    explicit_grid,
    mu,
    qpow_grid,
    rho,
    sigma,
    uniform_grid,
)

__all__ = [
    "CoefficientPair",
    "GridFunction",
    "GridSpec",
    "TimeScaleGrid",
    "build_grid",
    "dagger",
    "dagger_values",
    "delta_antiderivative",
    "delta_derivative",
    "delta_integral",
    "exp_ts",
    "exp_ts_values",
    "explicit_grid",
    "is_regressive",
    "mu",
    "qpow_grid",
    "rho",
    "sigma",
    "solve_ivp",
    "uniform_grid",
]
