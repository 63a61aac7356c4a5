from .bundle import (
    LagrangianBundle,
    bundle_to_form,
    form_to_bundle,
    is_bundle_file,
    read_bundle,
    write_bundle,
)
from .tables import grid_columns, lagrangian_columns, read_trajectory, write_columns

__all__ = [
    "LagrangianBundle",
    "bundle_to_form",
    "form_to_bundle",
    "grid_columns",
    "is_bundle_file",
    "lagrangian_columns",
    "read_bundle",
    "read_trajectory",
    "write_bundle",
    "write_columns",
]
