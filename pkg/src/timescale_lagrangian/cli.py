"""Command-line entry point for the time-scale Lagrangian toolkit."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .config import ProblemConfig, config_schema_text, load_config
from .errors import (
    ArityError,
    BoundaryMismatchError,
    BundleFormatError,
    ExpressionEvaluationError,
    ExpressionSyntaxError,
    GridConfigError,
    GridDomainError,
    IngredientValidationError,
    RegressivityError,
)
from .inverse import literal_general_form, r_coefficient
from .storage import bundle_to_form, grid_columns, is_bundle_file, read_bundle, read_trajectory, write_columns
from .timescale import exp_ts_values
from .utils.env_loader import load_env_file, log_level, output_dir
from .variational import VariationalProblem, VerificationReport, evaluate_functional, render_comparison, render_report
from .workflow import (
    build_problem_grid,
    configure_logging,
    run_build,
    run_sweep,
    synthesize,
    verify_expression,
    verify_form,
)


EXIT_OK = 0
EXIT_VALIDATION = 3
EXIT_CHECK_FAILED = 4

INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    ValidationError,
    json.JSONDecodeError,
    BundleFormatError,
    ExpressionSyntaxError,
    GridConfigError,
    GridDomainError,
)
VALIDATION_ERRORS = (
    IngredientValidationError,
    RegressivityError,
    ArityError,
    ExpressionEvaluationError,
)


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--env-file",
        default=None,
        help="Optional .env file loaded before reading LAGRANGIAN_* variables.",
    )
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help="Directory for bundles, tables and reports (default: $LAGRANGIAN_OUTPUT_DIR or output).",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help="Logging level (default: $LAGRANGIAN_LOG_LEVEL or INFO).",
    )


def _fail(args: argparse.Namespace, code: int, exc: Exception | str) -> int:
    print(f"{args._parser.prog}: error: {exc}", file=sys.stderr)
    return code


def _load_problem(args: argparse.Namespace) -> ProblemConfig:
    try:
        config = load_config(args.config)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    if getattr(args, "literal_general", False):
        config.options.literal_general = True  # type: ignore[union-attr]
    return config  # type: ignore[return-value]


def _destination(args: argparse.Namespace) -> Path:
    return output_dir(args.output_dir)


def _cmd_build(args: argparse.Namespace) -> int:
    config = _load_problem(args)
    if config.ingredients is None:
        args._parser.error("build needs 'ingredients'; this configuration holds a hand-written lagrangian")

    try:
        result = run_build(config, _destination(args), Path(args.config).stem)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    print(f"Wrote bundle to {result.bundle_path}")
    print(f"Wrote table to {result.table_path}")
    if result.literal_bundle_path is not None:
        print(f"Wrote literal general form to {result.literal_bundle_path}")
    return EXIT_OK


def _write_report(args: argparse.Namespace, stem: str, report: VerificationReport) -> Path:
    path = _destination(args) / f"{stem}.report.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def _verify_bundle(args: argparse.Namespace) -> int:
    if args.literal_general:
        args._parser.error("--literal-general applies to problem configurations; a bundle holds one form")

    try:
        bundle = read_bundle(args.config)
        _, form = bundle_to_form(bundle)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    try:
        report = verify_form(form, bundle.options)
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)
    except BoundaryMismatchError as exc:
        return _fail(args, EXIT_CHECK_FAILED, exc)

    title = "literal general form" if form.literal_general else "synthesized Lagrangian"
    print(render_report(report, title=title))
    _write_report(args, Path(args.config).stem, report)
    return EXIT_OK if report.passed(bundle.options.tolerance_el) else EXIT_CHECK_FAILED


def _verify_config(args: argparse.Namespace) -> int:
    config = _load_problem(args)
    options = config.options
    stem = Path(args.config).stem
    literal_report: VerificationReport | None = None

    try:
        if config.lagrangian is not None:
            report = verify_expression(config)
            title = f"L = {config.lagrangian}"
        else:
            grid = build_problem_grid(config)
            form = synthesize(config, grid)
            report = verify_form(form, options)
            title = "synthesized Lagrangian"
            if options.literal_general and not form.extremal.is_zero:
                literal = literal_general_form(grid, config.ingredients.to_bundle(), form.extremal)  # type: ignore[union-attr]
                literal_report = verify_form(literal, options)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)
    except BoundaryMismatchError as exc:
        return _fail(args, EXIT_CHECK_FAILED, exc)

    print(render_report(report, title=title))
    _write_report(args, stem, report)
    if literal_report is not None:
        print()
        print(render_comparison(report, literal_report, titles=("shifted", "literal")))
        _write_report(args, f"{stem}.literal", literal_report)
    return EXIT_OK if report.passed(options.tolerance_el) else EXIT_CHECK_FAILED


def _cmd_verify(args: argparse.Namespace) -> int:
    if is_bundle_file(args.config):
        return _verify_bundle(args)
    return _verify_config(args)


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        bundle = read_bundle(args.bundle)
        grid, form = bundle_to_form(bundle)
        trajectory = read_trajectory(args.trajectory, grid)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    try:
        value = evaluate_functional(VariationalProblem.from_form(form), trajectory)
    except BoundaryMismatchError as exc:
        return _fail(args, EXIT_CHECK_FAILED, exc)
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    print(f"{value:.15g}")
    return EXIT_OK


def _cmd_table(args: argparse.Namespace) -> int:
    config = _load_problem(args)
    try:
        grid = build_problem_grid(config)
        exp_r = exp_ts_values(r_coefficient(grid))
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    columns = grid_columns(grid, {"exp_r": exp_r})
    path = write_columns(_destination(args) / f"{Path(args.config).stem}.table.csv", columns)
    print(f"Wrote table to {path}")
    return EXIT_OK


def _cmd_schema(args: argparse.Namespace) -> int:
    print(config_schema_text())
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_problem(args)
    if args.draws <= 0:
        args._parser.error("--draws must be positive")
    if args.workers <= 0:
        args._parser.error("--workers must be positive")

    try:
        summary = run_sweep(config, draws=args.draws, max_workers=args.workers, degree=args.degree)
    except INPUT_ERRORS as exc:
        args._parser.error(str(exc))
    except VALIDATION_ERRORS as exc:
        return _fail(args, EXIT_VALIDATION, exc)

    print(f"draws                    {summary.draws}")
    print(f"passed                   {summary.passed}")
    print(f"failed                   {summary.failed}")
    print(f"worst_el_constancy       {summary.worst_el_constancy:.15g}")
    print(f"worst_legendre_deviation {summary.worst_legendre_deviation:.15g}")
    for outcome in summary.failures:
        print(f"failed draw {outcome.index}: {outcome.error or 'check tolerance exceeded'}")
    return EXIT_OK if summary.ok else EXIT_CHECK_FAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Synthesize and verify Lagrangians with a prescribed extremal on isolated time scales.",
    )
    subparsers = parser.add_subparsers(dest="command")

    build_parser = subparsers.add_parser(
        "build",
        help="Synthesize the Lagrangian of a problem configuration and write its bundle and table.",
    )
    build_parser.add_argument("config", help="Problem configuration JSON file.")
    build_parser.add_argument(
        "--literal-general",
        action="store_true",
        help="Also write the literal general-extremal form for a nonzero extremal.",
    )
    _add_common_options(build_parser)
    build_parser.set_defaults(func=_cmd_build, _parser=build_parser)

    verify_parser = subparsers.add_parser(
        "verify",
        help="Check the Euler-Lagrange and Legendre conditions for a configuration or bundle.",
    )
    verify_parser.add_argument("config", help="Problem configuration or Lagrangian bundle JSON file.")
    verify_parser.add_argument(
        "--literal-general",
        action="store_true",
        help="Compare against the literal general-extremal form (configurations only).",
    )
    _add_common_options(verify_parser)
    verify_parser.set_defaults(func=_cmd_verify, _parser=verify_parser)

    eval_parser = subparsers.add_parser(
        "eval",
        help="Evaluate the functional of a bundle along a trajectory CSV with columns t and y.",
    )
    eval_parser.add_argument("bundle", help="Lagrangian bundle JSON file.")
    eval_parser.add_argument("trajectory", help="CSV file with columns t and y covering every grid point.")
    _add_common_options(eval_parser)
    eval_parser.set_defaults(func=_cmd_eval, _parser=eval_parser)

    table_parser = subparsers.add_parser(
        "table",
        help="Write the grid columns (index, t, sigma, mu, exp_r) of a configuration.",
    )
    table_parser.add_argument("config", help="Problem configuration JSON file.")
    _add_common_options(table_parser)
    table_parser.set_defaults(func=_cmd_table, _parser=table_parser)

    schema_parser = subparsers.add_parser(
        "schema",
        help="Print the JSON schema of problem configurations.",
    )
    _add_common_options(schema_parser)
    schema_parser.set_defaults(func=_cmd_schema, _parser=schema_parser)

    sweep_parser = subparsers.add_parser(
        "sweep",
        help="Synthesize and verify random polynomial ingredients on the configured grid.",
    )
    sweep_parser.add_argument("config", help="Problem configuration JSON file (grid, extremal, options).")
    sweep_parser.add_argument(
        "--draws",
        type=int,
        default=50,
        help="Number of random ingredient bundles (default: %(default)s).",
    )
    sweep_parser.add_argument(
        "--workers",
        type=int,
        default=4,
        help="Concurrent verification workers (default: %(default)s).",
    )
    sweep_parser.add_argument(
        "--degree",
        type=int,
        default=3,
        help="Total degree of the random polynomials (default: %(default)s).",
    )
    _add_common_options(sweep_parser)
    sweep_parser.set_defaults(func=_cmd_sweep, _parser=sweep_parser)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(sys.argv[1:] if argv is None else list(argv))

    func = getattr(args, "func", None)
    if func is None:
        parser.print_help()
        return 2

    load_env_file(args.env_file)
    configure_logging(args.log_level or log_level())
    return func(args)


if __name__ == "__main__":  # pragma: no cover - CLI entry guard
    sys.exit(main())


__all__ = ["main"]
