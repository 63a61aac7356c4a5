from dataclasses import dataclass

import numpy as np
import pytest
from numpy.testing import assert_allclose

from timescale_lagrangian.errors import BoundaryMismatchError, GridDomainError
from timescale_lagrangian.expr import HyperDual, evaluate, parse
from timescale_lagrangian.inverse import (
    Extremal,
    IngredientBundle,
    LagrangianForm,
    assemble_lagrangian,
    literal_general_form,
)
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid, qpow_grid, uniform_grid
from timescale_lagrangian.variational import (
    ExpressionLagrangian,
    VariationalProblem,
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
from timescale_lagrangian.workflow import random_ingredients


def _random_grid(seed: int, size: int = 20) -> TimeScaleGrid:
    rng = np.random.default_rng(seed)
    steps = rng.uniform(0.2, 1.0, size=size - 1)
    return TimeScaleGrid(-3.0 + np.concatenate(([0.0], np.cumsum(steps))))


ACCEPTANCE_GRIDS = {
    "uniform": lambda: uniform_grid(0, 5, 0.5),
    "qpow": lambda: qpow_grid(2, 0, 6),
    "random": lambda: _random_grid(2718),
}


def _problem(grid: TimeScaleGrid, source: str, boundary=(0.0, 0.0)) -> VariationalProblem:
    return VariationalProblem(grid, ExpressionLagrangian.from_source(grid, source), boundary)


def _p_values(form: LagrangianForm) -> np.ndarray:
    grid = form.grid
    return np.array([evaluate(form.ingredients.p, t) for t in grid.points[: grid.kappa2_size]])


def test_functional_of_constant_lagrangian_is_interval_length():
    grid = qpow_grid(2, 0, 4)

    value = evaluate_functional(_problem(grid, "1"), np.zeros(len(grid)))

    assert value == grid.b - grid.a


def test_functional_of_kinetic_lagrangian():
    grid = uniform_grid(0, 3, 1)

    assert evaluate_functional(_problem(grid, "0.5*v^2"), [0.0, 1.0, 2.0, 0.0]) == 3.0


def test_functional_checks_boundary_values():
    grid = uniform_grid(0, 3, 1)

    with pytest.raises(BoundaryMismatchError, match="y\\(b\\)"):
        evaluate_functional(_problem(grid, "0.5*v^2"), [0.0, 1.0, 2.0, 1.0])
    with pytest.raises(GridDomainError):
        evaluate_functional(_problem(grid, "0.5*v^2"), [0.0, 1.0, 0.0])


def test_euler_lagrange_residual_of_kinetic_lagrangian():
    grid = uniform_grid(0, 2, 1)

    g, constancy = el_residual(_problem(grid, "0.5*v^2"), [0.0, 1.0, 0.0])

    assert_allclose(g.values, [1.0, -1.0])
    assert constancy == 1.0


def test_linear_trajectory_is_kinetic_extremal():
    grid = uniform_grid(0, 4, 1)
    line = 0.5 * grid.points
    problem = _problem(grid, "0.5*v^2", (0.0, 2.0))

    g, constancy = el_residual(problem, line)

    assert_allclose(g.values, 0.5)
    assert constancy == 0.0
    assert stationarity_gradient(problem, line) == 0.0


def test_kinked_trajectory_is_not_stationary():
    grid = uniform_grid(0, 2, 1)
    problem = _problem(grid, "0.5*v^2")

    assert_allclose(functional_gradient(problem, [0.0, 1.0, 0.0]), [2.0])
    assert stationarity_gradient_fd(problem, [0.0, 1.0, 0.0]) == pytest.approx(2.0, rel=1e-6)


def test_legendre_expression_of_kinetic_lagrangian():
    grid = uniform_grid(0, 4, 1)

    lhs = legendre_lhs(_problem(grid, "0.5*v^2"), np.zeros(len(grid)))

    assert_allclose(lhs.values, 2.0)
    assert len(lhs) == grid.kappa2_size


def test_c1rd_norm():
    grid = uniform_grid(0, 2, 1)
    y = GridFunction(grid, [0.0, 1.0, 0.0])

    assert c1rd_norm(y) == 2.0
    assert c1rd_norm(GridFunction.constant(grid, 0.0)) == 0.0
    assert c1rd_norm(-3.0 * y) == 3.0 * c1rd_norm(y)


def test_perturbations_of_convex_problem():
    grid = uniform_grid(0, 5, 0.5)
    line = 0.2 * grid.points
    problem = _problem(grid, "0.5*v^2", (0.0, 1.0))

    assert perturbation_sample(problem, line, count=40, radius=1e-2, seed=1) >= -1e-12
    assert perturbation_sample(problem, line, count=5, radius=0.0, seed=1) == 0.0
    with pytest.raises(ValueError):
        perturbation_sample(problem, line, count=0, radius=1e-2, seed=1)


def test_perturbation_sample_is_deterministic():
    grid = uniform_grid(0, 3, 0.25)
    problem = _problem(grid, "0.5*v^2 + sin(t)*x^2")
    zero = np.zeros(len(grid))

    first = perturbation_sample(problem, zero, count=30, radius=1e-3, seed=42, max_workers=4)
    second = perturbation_sample(problem, zero, count=30, radius=1e-3, seed=42, max_workers=1)

    assert first == second


@pytest.mark.parametrize("family", sorted(ACCEPTANCE_GRIDS))
@pytest.mark.parametrize("extremal_source", [None, "sin(t)"])
def test_synthesized_lagrangians_satisfy_both_conditions(family, extremal_source):
    grid = ACCEPTANCE_GRIDS[family]()
    extremal = Extremal.zero() if extremal_source is None else Extremal.from_expression(extremal_source)
    rng = np.random.default_rng(77)
    for _ in range(50):
        ingredients = random_ingredients(rng).to_bundle()
        form = assemble_lagrangian(grid, ingredients, extremal)
        y0 = form.extremal_values()
        problem = VariationalProblem.from_form(form)

        g, constancy = el_residual(problem, y0)
        lhs = legendre_lhs(problem, y0)
        p = _p_values(form)

        assert constancy <= 1e-9
        assert abs(float(np.mean(g.values)) - ingredients.C) <= 1e-9
        assert np.max(np.abs(lhs.values - p)) <= 1e-10 * max(1.0, float(np.max(np.abs(p))))
        assert np.min(lhs.values) > 0


@dataclass
class _DroppedQBaseline:
    """A synthesized form with the q(t, 0) subtraction left out."""

    form: LagrangianForm

    @property
    def grid(self) -> TimeScaleGrid:
        return self.form.grid

    def evaluate(self, index: int, x: float, v: float) -> HyperDual:
        vs = HyperDual.seed_v(v - float(self.form.shift_v[index]))
        return self.form.evaluate(index, x, v) + float(self.form.q_baseline[index]) * vs


@pytest.mark.parametrize("family", sorted(ACCEPTANCE_GRIDS))
def test_dropping_the_q_baseline_breaks_euler_lagrange(family):
    grid = ACCEPTANCE_GRIDS[family]()
    ingredients = IngredientBundle.from_sources(P="t*x^2", q="t^2 + x", w="v^2", p="1 + t^2", C=0.5)
    form = assemble_lagrangian(grid, ingredients)
    zero = form.extremal_values()

    _, correct = el_residual(VariationalProblem.from_form(form), zero)
    _, broken = el_residual(VariationalProblem(grid, _DroppedQBaseline(form)), zero)

    assert correct <= 1e-9
    assert broken > 1e-3


def _small_form(extremal: Extremal) -> LagrangianForm:
    grid = uniform_grid(0, 2, 0.25)
    ingredients = IngredientBundle.from_sources(
        P="cos(t) + 0.3*t*x + 0.5*x^2 - 0.1*x^3",
        q="sin(t)*x",
        w="0.2*x*v",
        p="1 + t^2/4",
        C=0.1,
        R0=0.3,
    )
    return assemble_lagrangian(grid, ingredients, extremal)


@pytest.mark.parametrize("extremal_source", [None, "0.5*sin(t)"])
def test_exact_gradient_matches_finite_differences(extremal_source):
    extremal = Extremal.zero() if extremal_source is None else Extremal.from_expression(extremal_source)
    form = _small_form(extremal)
    problem = VariationalProblem.from_form(form)
    y0 = form.extremal_values()

    assert stationarity_gradient(problem, y0) <= 1e-7
    assert stationarity_gradient_fd(problem, y0) <= 1e-7

    rng = np.random.default_rng(5)
    bump = np.zeros(len(y0))
    bump[1:-1] = 0.05 * rng.standard_normal(len(y0) - 2)
    moved = y0.values + bump
    assert np.max(np.abs(functional_gradient(problem, moved) - functional_gradient_fd(problem, moved))) <= 1e-6


def test_functional_at_shifted_extremal_is_potential_sum():
    form = _small_form(Extremal.from_expression("0.5*sin(t)"))
    grid = form.grid
    problem = VariationalProblem.from_form(form)

    value = evaluate_functional(problem, form.extremal_values())

    P = parse("cos(t) + 0.3*t*x + 0.5*x^2 - 0.1*x^3")
    expected = sum(m * evaluate(P, t, 0.0) for t, m in zip(grid.points[:-1], grid.mu_values[:-1]))
    assert value == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_verify_report_for_synthesized_form():
    form = _small_form(Extremal.zero())

    report = verify(
        VariationalProblem.from_form(form),
        form.extremal_values(),
        p=GridFunction(form.grid, _p_values(form)),
        perturbations=20,
        radius=1e-3,
        seed=3,
    )

    assert report.passed(1e-9)
    assert report.legendre_strict
    assert report.el_constant == pytest.approx(0.1, abs=1e-12)
    assert report.legendre_deviation <= 1e-10 * 2
    assert report.perturbation_min_delta is not None
    assert len(report.t) == form.grid.kappa_size


def test_verify_flags_a_non_extremal():
    grid = uniform_grid(0, 3, 1)
    problem = _problem(grid, "0.5*v^2 - x")

    report = verify(problem, np.zeros(len(grid)))

    assert report.el_residual == [0.0, 1.0, 2.0]
    assert not report.passed(1e-9)
    assert report.legendre_strict


def test_verify_is_deterministic():
    form = _small_form(Extremal.from_expression("0.5*sin(t)"))
    problem = VariationalProblem.from_form(form)

    first = verify(problem, form.extremal_values(), perturbations=10, seed=9)
    second = verify(problem, form.extremal_values(), perturbations=10, seed=9)

    assert first.model_dump_json() == second.model_dump_json()


def test_literal_form_residual_is_measured():
    grid = uniform_grid(0, 3, 0.5)
    ingredients = IngredientBundle.from_sources(P="x^2*t", q="x^2", w="x*v", p="2")
    extremal = Extremal.from_expression("t")
    literal = literal_general_form(grid, ingredients, extremal)
    shifted = assemble_lagrangian(grid, ingredients, extremal)

    literal_report = verify(VariationalProblem.from_form(literal), literal.extremal_values())
    shifted_report = verify(VariationalProblem.from_form(shifted), shifted.extremal_values())

    assert shifted_report.el_constancy <= 1e-9
    assert np.isfinite(literal_report.el_constancy)
    text = render_comparison(shifted_report, literal_report)
    assert "g_shifted" in text and "g_literal" in text
    assert len(text.splitlines()) == 5 + grid.kappa_size


def test_render_report_layout():
    grid = uniform_grid(0, 2, 1)
    report = verify(_problem(grid, "0.5*v^2"), [0.0, 1.0, 0.0])

    lines = render_report(report, title="kinetic").splitlines()

    assert lines[0] == "[kinetic]"
    assert lines[1].split() == ["el_constant", "0"]
    assert lines[2].split() == ["el_constancy", "1"]
    assert lines[5].split() == ["legendre_deviation", "-"]
    assert len(lines) == 10 + grid.kappa_size


@pytest.mark.parametrize("extremal_source", [None, "0.5*sin(t)"])
@pytest.mark.parametrize("literal", [False, True])
def test_functional_ignores_constant_added_to_w(extremal_source, literal):
    grid = uniform_grid(0, 2, 0.25)
    extremal = Extremal.zero() if extremal_source is None else Extremal.from_expression(extremal_source)
    sources = {"P": "cos(t) + 0.3*t*x + 0.5*x^2", "q": "sin(t)*x", "p": "1 + t^2/4", "C": 0.1, "R0": 0.3}
    build = literal_general_form if literal else assemble_lagrangian
    plain = build(grid, IngredientBundle.from_sources(w="0.2*x*v", **sources), extremal)
    lifted = build(grid, IngredientBundle.from_sources(w="0.2*x*v + 3.5", **sources), extremal)

    y0 = plain.extremal_values().values
    rng = np.random.default_rng(41)
    bump = np.zeros(len(y0))
    bump[1:-1] = 0.1 * rng.standard_normal(len(y0) - 2)
    for trajectory in (y0, y0 + bump):
        expected = evaluate_functional(VariationalProblem.from_form(plain), trajectory)
        value = evaluate_functional(VariationalProblem.from_form(lifted), trajectory)
        assert value == pytest.approx(expected, rel=1e-12, abs=1e-12)
