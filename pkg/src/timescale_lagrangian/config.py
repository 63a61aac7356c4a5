"""Problem configuration: the JSON document read by the command-line tools."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, NonNegativeInt, PositiveFloat, model_validator

from timescale_lagrangian.inverse import Extremal, IngredientBundle
from timescale_lagrangian.timescale.grid import GridSpec


class IngredientsConfig(BaseModel):
    P: str = "0"
    p: str = "1"
    q: str = "0"
    w: str = "0"
    C: float = 0.0
    R0: float = 0.0

    def to_bundle(self) -> IngredientBundle:
        return IngredientBundle.from_sources(
            P=self.P, p=self.p, q=self.q, w=self.w, C=self.C, R0=self.R0
        )


class ExtremalConfig(BaseModel):
    kind: Literal["zero", "expr", "values"] = "zero"
    payload: str | list[float] | None = None

    @model_validator(mode="after")
    def _payload_matches_kind(self) -> ExtremalConfig:
        if self.kind == "expr" and not isinstance(self.payload, str):
            raise ValueError("extremal of kind 'expr' needs an expression string payload")
        if self.kind == "values" and not isinstance(self.payload, list):
            raise ValueError("extremal of kind 'values' needs a list of numbers as payload")
        return self

    def to_extremal(self) -> Extremal:
        if self.kind == "expr":
            return Extremal.from_expression(self.payload)  # type: ignore[arg-type]
        if self.kind == "values":
            return Extremal.from_values(self.payload)  # type: ignore[arg-type]
        return Extremal.zero()


class OptionsConfig(BaseModel):
    literal_general: bool = False
    tolerance_el: PositiveFloat = 1e-9
    tolerance_legendre: PositiveFloat = 1e-10
    perturbations: NonNegativeInt = 0
    radius: PositiveFloat = 1e-3
    seed: int = 0
    r_profile_method: Literal["recurrence", "closed", "remark"] = "recurrence"


class ProblemConfig(BaseModel):
    """A grid, either ingredients or a hand-written Lagrangian, an extremal and check options."""

    timescale: GridSpec
    ingredients: IngredientsConfig | None = None
    lagrangian: str | None = Field(
        default=None,
        description="A single expression L(t, x, v) to verify instead of synthesizing one.",
    )
    extremal: ExtremalConfig = Field(default_factory=ExtremalConfig)
    options: OptionsConfig = Field(default_factory=OptionsConfig)

    @model_validator(mode="after")
    def _one_lagrangian_source(self) -> ProblemConfig:
        if self.ingredients is not None and self.lagrangian is not None:
            raise ValueError("give either 'ingredients' or 'lagrangian', not both")
        if self.ingredients is None and self.lagrangian is None:
            self.ingredients = IngredientsConfig()
        return self


def load_config(path: Path | str) -> ProblemConfig:
    config_path = Path(path)
    if not config_path.is_file():
        raise FileNotFoundError(f"No configuration file found at {config_path}")
    return ProblemConfig.model_validate_json(config_path.read_text(encoding="utf-8"))


def config_schema() -> dict[str, Any]:
    return ProblemConfig.model_json_schema()


def config_schema_text() -> str:
    return json.dumps(config_schema(), indent=2, sort_keys=True)


__all__ = [
    "ExtremalConfig",
    "IngredientsConfig",
    "OptionsConfig",
    "ProblemConfig",
    "config_schema",
    "config_schema_text",
    "load_config",
]
