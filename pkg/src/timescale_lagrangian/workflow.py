"""Build, verify and sweep pipelines shared by the command-line tools."""

from __future__ import annotations

import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from timescale_lagrangian.config import IngredientsConfig, OptionsConfig, ProblemConfig
from timescale_lagrangian.errors import LagrangianError
from timescale_lagrangian.expr import evaluate
from timescale_lagrangian.inverse import (
    Extremal,
    LagrangianForm,
    assemble_lagrangian,
    literal_general_form,
)
from timescale_lagrangian.storage import (
    form_to_bundle,
    lagrangian_columns,
    write_bundle,
    write_columns,
)
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid, build_grid
from timescale_lagrangian.variational import (
    ExpressionLagrangian,
    VariationalProblem,
    VerificationReport,
    verify,
)


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )


class ProgressReporter:
    """Report progress of a sweep of synthesis-and-verify draws."""

    def __init__(
        self,
        total: int,
        *,
        min_time_step: float = 5.0,
        min_count_step: int = 10,
    ):
        self.total = max(total, 0)
        self.min_time_step = max(min_time_step, 0.0)
        self.min_count_step = max(min_count_step, 1)
        self._last_report_time = time.monotonic()
        self._last_report_count = 0
        self._start_time = time.monotonic()

    def maybe_report(self, passed: int, failed: int, *, force: bool = False) -> None:
        """Report progress if enough time or draws have passed."""
        now = time.monotonic()
        done = passed + failed
        if not force:
            if (
                done - self._last_report_count < self.min_count_step
                and (now - self._last_report_time) < self.min_time_step
            ):
                return

        elapsed = now - self._start_time
        rate = done / elapsed if elapsed > 0 else 0
        logger.info(
            f"Progress: {done:,}/{self.total:,} draws | {passed:,} passed | "
            f"{failed:,} failed | {rate:.1f} draws/sec"
        )
        self._last_report_time = now
        self._last_report_count = done

    def finalize(self, passed: int, failed: int) -> None:
        elapsed = time.monotonic() - self._start_time
        done = passed + failed
        logger.info("=" * 60)
        logger.info("Sweep complete!")
        logger.info(f"Draws passed: {passed:,}")
        logger.info(f"Draws failed: {failed:,}")
        logger.info(f"Pass rate: {(passed / done * 100 if done > 0 else 0):.1f}%")
        logger.info(f"Total time: {elapsed:.2f} seconds")
        logger.info("=" * 60)


def build_problem_grid(config: ProblemConfig) -> TimeScaleGrid:
    return build_grid(config.timescale)


def synthesize(config: ProblemConfig, grid: TimeScaleGrid | None = None) -> LagrangianForm:
    """The shift-composed Lagrangian for the configured ingredients and extremal."""

    if config.ingredients is None:
        raise ValueError("configuration carries a hand-written Lagrangian, nothing to synthesize")
    grid = grid or build_problem_grid(config)
    return assemble_lagrangian(
        grid,
        config.ingredients.to_bundle(),
        config.extremal.to_extremal(),
        method=config.options.r_profile_method,
    )


@dataclass
class BuildResult:
    form: LagrangianForm
    bundle_path: Path
    table_path: Path
    literal_bundle_path: Path | None = None


def run_build(config: ProblemConfig, output_dir: Path, stem: str = "lagrangian") -> BuildResult:
    """Synthesize the Lagrangian and write its bundle and (t, sigma, mu, offsetQ, Rprofile) table."""

    grid = build_problem_grid(config)
    form = synthesize(config, grid)
    bundle_path = write_bundle(output_dir / f"{stem}.bundle.json", form_to_bundle(form, config.options))
    table_path = write_columns(output_dir / f"{stem}.lagrangian.csv", lagrangian_columns(form))
    logger.info(f"Wrote bundle {bundle_path} and table {table_path}")

    literal_path = None
    if config.options.literal_general and not form.extremal.is_zero:
        literal = literal_general_form(grid, config.ingredients.to_bundle(), form.extremal)  # type: ignore[union-attr]
        literal_path = write_bundle(
            output_dir / f"{stem}.literal.bundle.json", form_to_bundle(literal, config.options)
        )
        logger.info(f"Wrote literal general form {literal_path}")
    return BuildResult(form, bundle_path, table_path, literal_path)


def p_profile(form: LagrangianForm) -> GridFunction:
    """p sampled on the kappa^2-domain of the form's grid."""

    grid = form.grid
    return GridFunction(
        grid, np.array([evaluate(form.ingredients.p, t) for t in grid.points[: grid.kappa2_size]])
    )


def verify_form(form: LagrangianForm, options: OptionsConfig) -> VerificationReport:
    """Run every check on ``form`` along its own extremal."""

    extremal = form.extremal_values()
    problem = VariationalProblem.from_form(form, extremal)
    return verify(
        problem,
        extremal,
        p=p_profile(form),
        perturbations=options.perturbations,
        radius=options.radius,
        seed=options.seed,
    )


def verify_expression(config: ProblemConfig) -> VerificationReport:
    """Checks for a hand-written Lagrangian along the configured extremal."""

    grid = build_problem_grid(config)
    lagrangian = ExpressionLagrangian.from_source(grid, config.lagrangian or "0")
    extremal = config.extremal.to_extremal().sample(grid)
    problem = VariationalProblem(grid, lagrangian, (extremal[0], extremal[len(extremal) - 1]))
    options = config.options
    return verify(
        problem,
        extremal,
        perturbations=options.perturbations,
        radius=options.radius,
        seed=options.seed,
    )


def legendre_reproduced(report: VerificationReport, form: LagrangianForm, tolerance: float) -> bool:
    """max |legendre_lhs - p| within ``tolerance`` scaled by max(1, max |p|)."""

    if report.legendre_deviation is None:
        return False
    scale = max(1.0, float(np.max(np.abs(p_profile(form).values))))
    return report.legendre_deviation <= tolerance * scale


def _coefficient(rng: np.random.Generator) -> str:
    return repr(round(float(rng.uniform(-1.0, 1.0)), 6))


def _monomial(powers: dict[str, int]) -> str:
    factors = [name if k == 1 else f"{name}^{k}" for name, k in powers.items() if k > 0]
    return "*".join(factors)


def _polynomial(rng: np.random.Generator, variables: tuple[str, ...], degree: int) -> str:
    """Random polynomial of total degree <= ``degree`` in ``variables``."""

    exponents: list[tuple[int, ...]] = [()]
    for _ in variables:
        exponents = [e + (k,) for e in exponents for k in range(degree + 1 - sum(e))]
    terms = []
    for powers in exponents:
        monomial = _monomial(dict(zip(variables, powers)))
        coefficient = _coefficient(rng)
        terms.append(f"{coefficient}*{monomial}" if monomial else coefficient)
    return " + ".join(terms)


def random_ingredients(rng: np.random.Generator, degree: int = 3) -> IngredientsConfig:
    """Polynomial P, q, w of total degree <= ``degree`` and p = 1 + a + b t^2 with a, b >= 0."""

    a, b = (round(float(c), 6) for c in rng.uniform(0.0, 1.0, size=2))
    return IngredientsConfig(
        P=_polynomial(rng, ("t", "x"), degree),
        p=f"1 + {a!r} + {b!r}*t^2",
        q=_polynomial(rng, ("t", "x"), degree),
        w=_polynomial(rng, ("t", "x", "v"), degree),
        C=round(float(rng.uniform(-1.0, 1.0)), 6),
        R0=round(float(rng.uniform(-1.0, 1.0)), 6),
    )


@dataclass
class DrawOutcome:
    index: int
    passed: bool
    el_constancy: float = float("nan")
    legendre_deviation: float = float("nan")
    error: str | None = None


@dataclass
class SweepSummary:
    draws: int
    passed: int
    failed: int
    worst_el_constancy: float
    worst_legendre_deviation: float
    failures: list[DrawOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _run_draw(
    index: int,
    grid: TimeScaleGrid,
    ingredients: IngredientsConfig,
    extremal: Extremal,
    options: OptionsConfig,
) -> DrawOutcome:
    try:
        form = assemble_lagrangian(grid, ingredients.to_bundle(), extremal)
        report = verify_form(form, options.model_copy(update={"perturbations": 0}))
    except LagrangianError as exc:
        return DrawOutcome(index, False, error=str(exc))
    passed = report.passed(options.tolerance_el) and legendre_reproduced(
        report, form, options.tolerance_legendre
    )
    return DrawOutcome(
        index,
        passed,
        el_constancy=float(report.el_constancy or 0.0),
        legendre_deviation=float(report.legendre_deviation or 0.0),
    )


def run_sweep(
    config: ProblemConfig,
    *,
    draws: int,
    max_workers: int = 4,
    degree: int = 3,
) -> SweepSummary:
    """Synthesize and verify ``draws`` random ingredient bundles on the configured grid."""

    if draws <= 0:
        raise ValueError("draws must be positive")
    if max_workers <= 0:
        raise ValueError("max_workers must be positive")

    grid = build_problem_grid(config)
    extremal = config.extremal.to_extremal()
    rng = np.random.default_rng(config.options.seed)
    bundles = [random_ingredients(rng, degree) for _ in range(draws)]

    logger.info(f"Starting sweep of {draws} draws on {len(grid)} points with {max_workers} workers")
    progress = ProgressReporter(draws)
    outcomes: list[DrawOutcome] = []
    passed = failed = 0

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {
            executor.submit(_run_draw, i, grid, bundle, extremal, config.options): i
            for i, bundle in enumerate(bundles)
        }
        for future in as_completed(futures):
            outcome = future.result()
            outcomes.append(outcome)
            if outcome.passed:
                passed += 1
            else:
                failed += 1
                logger.warning(f"Draw {outcome.index} failed: {outcome.error or 'check tolerance exceeded'}")
            progress.maybe_report(passed, failed)

    progress.finalize(passed, failed)
    outcomes.sort(key=lambda o: o.index)
    finite = [o for o in outcomes if o.error is None]
    return SweepSummary(
        draws=draws,
        passed=passed,
        failed=failed,
        worst_el_constancy=max((o.el_constancy for o in finite), default=float("nan")),
        worst_legendre_deviation=max((o.legendre_deviation for o in finite), default=float("nan")),
        failures=[o for o in outcomes if not o.passed],
    )


__all__ = [
    "BuildResult",
    "DrawOutcome",
    "ProgressReporter",
    "SweepSummary",
    "build_problem_grid",
    "configure_logging",
    "legendre_reproduced",
    "p_profile",
    "random_ingredients",
    "run_build",
    "run_sweep",
    "synthesize",
    "verify_expression",
    "verify_form",
]
