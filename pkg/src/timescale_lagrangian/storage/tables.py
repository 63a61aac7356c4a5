"""Columnar CSV export of grids, Lagrangian profiles and trajectories."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from timescale_lagrangian.errors import BundleFormatError
from timescale_lagrangian.inverse import LagrangianForm
from timescale_lagrangian.timescale import GridFunction, TimeScaleGrid


FLOAT_FORMAT = "%.17g"


def write_columns(path: Path | str, columns: Mapping[str, Sequence[float] | np.ndarray]) -> Path:
    """Write equal-length numeric columns as CSV with round-trip float precision."""

    lengths = {len(values) for values in columns.values()}
    if len(lengths) != 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    matrix = np.column_stack([np.asarray(values, dtype=float) for values in columns.values()])
    np.savetxt(
        destination,
        matrix,
        delimiter=",",
        header=",".join(columns),
        comments="",
        fmt=FLOAT_FORMAT,
    )
    return destination


def lagrangian_columns(form: LagrangianForm) -> dict[str, np.ndarray]:
    """(t, sigma, mu, offsetQ, Rprofile) on the points a..rho(b)."""

    grid = form.grid
    size = grid.kappa_size
    return {
        "t": grid.points[:size],
        "sigma": grid.sigma_values[:size],
        "mu": grid.mu_values[:size],
        "offsetQ": form.offsetQ.values[:size],
        "Rprofile": form.Rprofile.values,
    }


def grid_columns(grid: TimeScaleGrid, extra: Mapping[str, GridFunction] | None = None) -> dict[str, np.ndarray]:
    """(index, t, sigma, mu) on every point, plus extra columns padded with NaN where undefined."""

    columns: dict[str, np.ndarray] = {
        "index": np.arange(len(grid), dtype=float),
        "t": grid.points,
        "sigma": grid.sigma_values,
        "mu": grid.mu_values,
    }
    for name, function in (extra or {}).items():
        padded = np.full(len(grid), np.nan)
        padded[: len(function)] = function.values
        columns[name] = padded
    return columns


def read_trajectory(path: Path | str, grid: TimeScaleGrid) -> GridFunction:
    """Read a (t, y) CSV and return y on ``grid``; every grid point must be present."""

    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"No trajectory file found at {source}")
    try:
        table = np.genfromtxt(source, delimiter=",", names=True, dtype=float, ndmin=1)
    except ValueError as exc:
        raise BundleFormatError(f"{source} is not a numeric CSV: {exc}") from exc
    names = table.dtype.names or ()
    if "t" not in names or "y" not in names:
        raise BundleFormatError(f"{source} needs columns 't' and 'y', found {list(names)}")

    by_time = {float(t): float(y) for t, y in zip(table["t"], table["y"])}
    missing = [float(t) for t in grid.points if float(t) not in by_time]
    if missing:
        raise BundleFormatError(f"trajectory is missing grid point t={missing[0]!r}")
    values = np.array([by_time[float(t)] for t in grid.points])
    blank = np.flatnonzero(~np.isfinite(values))
    if blank.size:
        raise BundleFormatError(f"trajectory has no finite y at t={float(grid.points[blank[0]])!r}")
    return GridFunction(grid, values)


__all__ = [
    "FLOAT_FORMAT",
    "grid_columns",
    "lagrangian_columns",
    "read_trajectory",
    "write_columns",
]
