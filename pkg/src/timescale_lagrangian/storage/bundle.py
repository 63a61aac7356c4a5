"""JSON bundles holding a synthesized Lagrangian and the data needed to rebuild it."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ValidationError

from timescale_lagrangian.config import IngredientsConfig, OptionsConfig
from timescale_lagrangian.errors import BundleFormatError
from timescale_lagrangian.inverse import Extremal, LagrangianForm, sample_ingredients
from timescale_lagrangian.inverse.lagrangian import make_form
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid, build_grid
from timescale_lagrangian.timescale.grid import ExplicitGridSpec, GridSpec


BUNDLE_FORMAT = "timescale-lagrangian/bundle"


class ExtremalRecord(BaseModel):
    kind: Literal["zero", "expr", "values"]
    source: str | None = None
    values: list[float]


class LagrangianBundle(BaseModel):
    format: Literal["timescale-lagrangian/bundle"] = BUNDLE_FORMAT
    version: int = 1
    grid: GridSpec
    ingredients: IngredientsConfig
    extremal: ExtremalRecord
    literal_general: bool = False
    offsetQ: list[float]
    Rprofile: list[float]
    options: OptionsConfig = OptionsConfig()


def form_to_bundle(form: LagrangianForm, options: OptionsConfig | None = None) -> LagrangianBundle:
    grid = form.grid
    grid_spec = grid.spec if grid.spec is not None else ExplicitGridSpec(points=grid.points.tolist())
    extremal = form.extremal
    return LagrangianBundle(
        grid=grid_spec,  # type: ignore[arg-type]
        ingredients=IngredientsConfig(**form.ingredients.to_sources()),  # type: ignore[arg-type]
        extremal=ExtremalRecord(
            kind=extremal.kind,
            source=extremal.source,
            values=form.extremal_values().values.tolist(),
        ),
        literal_general=form.literal_general,
        offsetQ=form.offsetQ.values.tolist(),
        Rprofile=form.Rprofile.values.tolist(),
        options=options or OptionsConfig(),
    )


def bundle_to_form(bundle: LagrangianBundle) -> tuple[TimeScaleGrid, LagrangianForm]:
    """Rebuild the grid and form; stored offset and R-profile arrays are used as-is."""

    grid = build_grid(bundle.grid)
    if len(bundle.offsetQ) != len(grid) or len(bundle.Rprofile) != grid.kappa_size:
        raise BundleFormatError(
            f"bundle arrays do not match a grid of {len(grid)} points "
            f"(offsetQ={len(bundle.offsetQ)}, Rprofile={len(bundle.Rprofile)})"
        )
    if len(bundle.extremal.values) != len(grid):
        raise BundleFormatError("stored extremal values do not cover the grid")

    ingredients = bundle.ingredients.to_bundle()
    record = bundle.extremal
    if record.kind == "zero":
        extremal = Extremal.zero()
    elif record.kind == "expr" and record.source is not None:
        extremal = Extremal.from_expression(record.source)
    else:
        extremal = Extremal.from_values(np.array(record.values))

    form = make_form(
        grid,
        ingredients,
        extremal,
        GridFunction(grid, np.array(bundle.offsetQ)),
        GridFunction(grid, np.array(bundle.Rprofile)),
        sample_ingredients(grid, ingredients),
        literal_general=bundle.literal_general,
    )
    return grid, form


def write_bundle(path: Path | str, bundle: LagrangianBundle) -> Path:
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(bundle.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return destination


def read_bundle(path: Path | str) -> LagrangianBundle:
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"No bundle found at {source}")
    try:
        return LagrangianBundle.model_validate_json(source.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise BundleFormatError(f"{source} is not a valid Lagrangian bundle: {exc}") from exc


def is_bundle_file(path: Path | str) -> bool:
    """True when the JSON document at ``path`` declares the bundle format."""

    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return False
    return isinstance(document, dict) and document.get("format") == BUNDLE_FORMAT


__all__ = [
    "BUNDLE_FORMAT",
    "ExtremalRecord",
    "LagrangianBundle",
    "bundle_to_form",
    "form_to_bundle",
    "is_bundle_file",
    "read_bundle",
    "write_bundle",
]
