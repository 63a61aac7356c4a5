"""Numerical verification of first- and second-order necessary conditions.

Every check evaluates the Lagrangian along a trajectory y at the triples
(t, y^sigma(t), y^Delta(t)) for t in the kappa-domain, using exact partials
from forward differentiation.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
from pydantic import BaseModel

from timescale_lagrangian.errors import BoundaryMismatchError, GridDomainError
from timescale_lagrangian.expr import Expr, HyperDual, eval2, parse, to_source, validate_arity
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid, dagger_values, delta_derivative


logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12
DEFAULT_FD_STEP = 1e-6


class Evaluable(Protocol):
    grid: TimeScaleGrid

    def evaluate(self, index: int, x: float, v: float) -> HyperDual: ...


@dataclass(frozen=True, eq=False)
class ExpressionLagrangian:
    """A Lagrangian given directly as one expression L(t, x, v)."""

    grid: TimeScaleGrid
    tree: Expr

    @classmethod
    def from_source(cls, grid: TimeScaleGrid, source: str) -> ExpressionLagrangian:
        tree = parse(source)
        validate_arity(tree, ("t", "x", "v"), label="lagrangian")
        return cls(grid, tree)

    @property
    def source(self) -> str:
        return to_source(self.tree)

    def evaluate(self, index: int, x: float, v: float) -> HyperDual:
        return eval2(self.tree, float(self.grid.points[index]), x, v)


@dataclass(frozen=True, eq=False)
class VariationalProblem:
    grid: TimeScaleGrid
    L: Evaluable
    boundary: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        alpha, beta = (float(b) for b in self.boundary)
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            raise BoundaryMismatchError("boundary values must be finite")
        object.__setattr__(self, "boundary", (alpha, beta))

    @classmethod
    def from_form(cls, form: Evaluable, extremal: GridFunction | None = None) -> VariationalProblem:
        """Problem whose boundary values are those of ``extremal`` (or of the form's own extremal)."""

        if extremal is None:
            extremal = form.extremal_values()  # type: ignore[attr-defined]
        return cls(form.grid, form, (extremal[0], extremal[len(extremal) - 1]))


class VerificationReport(BaseModel):
    """Outcome of the checks run on one trajectory; unset fields mean the check did not run."""

    t: list[float]
    el_residual: list[float] | None = None
    el_constancy: float | None = None
    el_constant: float | None = None
    legendre_lhs: list[float] | None = None
    legendre_min: float | None = None
    legendre_deviation: float | None = None
    grad_norm: float | None = None
    functional_value: float | None = None
    perturbation_min_delta: float | None = None

    @property
    def legendre_strict(self) -> bool:
        return self.legendre_min is not None and self.legendre_min > 0

    def passed(self, tolerance_el: float) -> bool:
        return (
            self.el_constancy is not None
            and self.el_constancy <= tolerance_el
            and self.legendre_strict
        )


def _trajectory(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> GridFunction:
    if not isinstance(y, GridFunction):
        y = GridFunction(prob.grid, np.asarray(y, dtype=float))
    if y.grid is not prob.grid:
        if not np.array_equal(y.grid.points, prob.grid.points):
            raise GridDomainError("trajectory lives on a different grid")
        y = GridFunction(prob.grid, y.values)
    if len(y) != len(prob.grid):
        raise GridDomainError(f"trajectory needs {len(prob.grid)} values, got {len(y)}")
    return y


def _along(prob: VariationalProblem, y: GridFunction) -> list[HyperDual]:
    y_sigma = y.values[1:].tolist()
    y_delta = delta_derivative(y).values.tolist()
    return [prob.L.evaluate(k, xs, vd) for k, (xs, vd) in enumerate(zip(y_sigma, y_delta))]


def _check_boundary(prob: VariationalProblem, y: GridFunction) -> None:
    alpha, beta = prob.boundary
    ya, yb = y[0], y[len(y) - 1]
    if abs(ya - alpha) > BOUNDARY_TOLERANCE * max(1.0, abs(alpha)):
        raise BoundaryMismatchError(f"y(a) = {ya!r} but the boundary condition is {alpha!r}")
    if abs(yb - beta) > BOUNDARY_TOLERANCE * max(1.0, abs(beta)):
        raise BoundaryMismatchError(f"y(b) = {yb!r} but the boundary condition is {beta!r}")


def evaluate_functional(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> float:
    """Delta integral of L(t, y^sigma, y^Delta) over [a, b)."""

    y = _trajectory(prob, y)
    _check_boundary(prob, y)
    return _functional(prob, y.values)


def _functional(prob: VariationalProblem, values: np.ndarray) -> float:
    y = GridFunction(prob.grid, values)
    terms = np.array([d.value for d in _along(prob, y)])
    return float(np.dot(prob.grid.mu_values[:-1], terms))


def el_residual(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> tuple[GridFunction, float]:
    """g(t) = L_v(t) - integral over [a, t) of L_x; the Euler-Lagrange equation holds iff g is constant."""

    y = _trajectory(prob, y)
    duals = _along(prob, y)
    L_v = np.array([d.d_v for d in duals])
    L_x = np.array([d.d_x for d in duals])
    integral = np.concatenate(([0.0], np.cumsum(prob.grid.mu_values[: len(L_x) - 1] * L_x[:-1])))
    g = L_v - integral
    constancy = float(np.max(np.abs(g - g.mean())))
    return GridFunction(prob.grid, g), constancy


def legendre_lhs(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> GridFunction:
    """L_vv + mu {2 L_xv + mu L_xx + mu(sigma)^dagger L_vv(sigma)} on the kappa^2-domain."""

    y = _trajectory(prob, y)
    duals = _along(prob, y)
    n = prob.grid.kappa2_size
    mu_all = prob.grid.mu_values
    A = np.array([d.d_vv for d in duals])
    B = np.array([d.d_xx for d in duals])
    C = np.array([d.d_xv for d in duals])
    dag = dagger_values(mu_all[1 : n + 1])
    lhs = A[:n] + mu_all[:n] * (2.0 * C[:n] + mu_all[:n] * B[:n] + dag * A[1 : n + 1])
    return GridFunction(prob.grid, lhs)


def functional_gradient(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> np.ndarray:
    """Gradient of the discretized functional in the interior values y(t_1)..y(t_{N-1})."""

    y = _trajectory(prob, y)
    duals = _along(prob, y)
    mu_all = prob.grid.mu_values
    L_v = np.array([d.d_v for d in duals])
    L_x = np.array([d.d_x for d in duals])
    return mu_all[:-2] * L_x[:-1] + L_v[:-1] - L_v[1:]


def stationarity_gradient(prob: VariationalProblem, y: GridFunction | Sequence[float]) -> float:
    return float(np.max(np.abs(functional_gradient(prob, y))))


def functional_gradient_fd(
    prob: VariationalProblem,
    y: GridFunction | Sequence[float],
    step: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """Central-difference gradient of the functional; an oracle for ``functional_gradient``."""

    y = _trajectory(prob, y)
    base = y.values.copy()
    grad = np.empty(len(base) - 2)
    for j in range(1, len(base) - 1):
        up, down = base.copy(), base.copy()
        up[j] += step
        down[j] -= step
        grad[j - 1] = (_functional(prob, up) - _functional(prob, down)) / (2.0 * step)
    return grad


def stationarity_gradient_fd(
    prob: VariationalProblem,
    y: GridFunction | Sequence[float],
    step: float = DEFAULT_FD_STEP,
) -> float:
    return float(np.max(np.abs(functional_gradient_fd(prob, y, step))))


def c1rd_norm(y: GridFunction) -> float:
    """sup |y^sigma| + sup |y^Delta| over the kappa-domain."""

    return float(np.max(np.abs(y.values[1:])) + np.max(np.abs(delta_derivative(y).values)))


def perturbation_sample(
    prob: VariationalProblem,
    y0: GridFunction | Sequence[float],
    count: int,
    radius: float,
    seed: int,
    *,
    max_workers: int | None = None,
) -> float:
    """Smallest sampled change of the functional over zero-boundary perturbations.

    Perturbation directions and sizes are drawn up front from ``seed``; the
    functional evaluations may then run on a thread pool without affecting
    the result.
    """

    if count < 1:
        raise ValueError("count must be at least 1")
    if radius < 0:
        raise ValueError("radius must be non-negative")

    y0 = _trajectory(prob, y0)
    rng = np.random.default_rng(seed)
    base_value = _functional(prob, y0.values)
    candidates: list[np.ndarray] = []
    for _ in range(count):
        eta = np.zeros(len(y0))
        eta[1:-1] = rng.standard_normal(len(y0) - 2)
        scale = 1.0 - rng.random()
        size = c1rd_norm(GridFunction(prob.grid, eta))
        epsilon = radius * scale / size if size > 0 else 0.0
        candidates.append(y0.values + epsilon * eta)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        values = list(executor.map(lambda values: _functional(prob, values), candidates))

    deltas = np.array(values) - base_value
    logger.debug("perturbation sample: count=%d radius=%g min=%g", count, radius, deltas.min())
    return float(deltas.min())


def verify(
    prob: VariationalProblem,
    y: GridFunction | Sequence[float],
    *,
    p: GridFunction | None = None,
    perturbations: int = 0,
    radius: float = 1e-3,
    seed: int = 0,
) -> VerificationReport:
    """Run every check on ``y``; ``p`` enables the Legendre deviation."""

    y = _trajectory(prob, y)
    g, constancy = el_residual(prob, y)
    lhs = legendre_lhs(prob, y)
    report = VerificationReport(
        t=[float(t) for t in prob.grid.points[: prob.grid.kappa_size]],
        el_residual=g.values.tolist(),
        el_constancy=constancy,
        el_constant=float(g.values.mean()),
        legendre_lhs=lhs.values.tolist(),
        legendre_min=float(lhs.values.min()),
        grad_norm=stationarity_gradient(prob, y),
        functional_value=evaluate_functional(prob, y),
    )
    if p is not None:
        report.legendre_deviation = float(np.max(np.abs(lhs.values - p.values[: len(lhs)])))
    if perturbations > 0:
        report.perturbation_min_delta = perturbation_sample(prob, y, perturbations, radius, seed)
    return report


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.15g}"


def render_report(report: VerificationReport, *, title: str = "verification") -> str:
    """Fixed-order text rendering: summary lines, then a (t, g(t), legendre_lhs(t)) table."""

    lines = [
        f"[{title}]",
        f"el_constant            {_fmt(report.el_constant)}",
        f"el_constancy           {_fmt(report.el_constancy)}",
        f"legendre_min           {_fmt(report.legendre_min)}",
        f"legendre_strict        {report.legendre_strict}",
        f"legendre_deviation     {_fmt(report.legendre_deviation)}",
        f"grad_norm              {_fmt(report.grad_norm)}",
        f"functional_value       {_fmt(report.functional_value)}",
        f"perturbation_min_delta {_fmt(report.perturbation_min_delta)}",
        f"{'t':>24} {'g(t)':>24} {'legendre_lhs(t)':>24}",
    ]
    residual = report.el_residual or []
    legendre = report.legendre_lhs or []
    for i, t in enumerate(report.t):
        g = residual[i] if i < len(residual) else None
        lhs = legendre[i] if i < len(legendre) else None
        lines.append(f"{_fmt(t):>24} {_fmt(g):>24} {_fmt(lhs):>24}")
    return "\n".join(lines)


def render_comparison(
    left: VerificationReport,
    right: VerificationReport,
    *,
    titles: tuple[str, str] = ("shifted", "literal"),
) -> str:
    """Euler-Lagrange residuals of two reports on the same grid, side by side."""

    first, second = titles
    lines = [
        f"{'':24} {first:>24} {second:>24}",
        f"{'el_constant':24} {_fmt(left.el_constant):>24} {_fmt(right.el_constant):>24}",
        f"{'el_constancy':24} {_fmt(left.el_constancy):>24} {_fmt(right.el_constancy):>24}",
        f"{'legendre_min':24} {_fmt(left.legendre_min):>24} {_fmt(right.legendre_min):>24}",
        f"{'t':>24} {'g_' + first:>24} {'g_' + second:>24}",
    ]
    g_left = left.el_residual or []
    g_right = right.el_residual or []
    for i, t in enumerate(left.t):
        a = g_left[i] if i < len(g_left) else None
        b = g_right[i] if i < len(g_right) else None
        lines.append(f"{_fmt(t):>24} {_fmt(a):>24} {_fmt(b):>24}")
    return "\n".join(lines)


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
