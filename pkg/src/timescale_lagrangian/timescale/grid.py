"""Finite isolated time scales and the delta-calculus primitives defined on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Annotated, Callable, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, PositiveFloat

from timescale_lagrangian.errors import GridConfigError, GridDomainError


MIN_POINTS = 3
UNIFORM_SLACK = 1e-9
FAMILY_TOLERANCE = 1e-12

Domain = Literal["full", "kappa", "kappa2"]


class UniformGridSpec(BaseModel):
    """hZ restricted to [a, b]."""

    kind: Literal["uniform"] = "uniform"
    a: float = 0.0
    b: float
    h: PositiveFloat = 1.0


class QPowGridSpec(BaseModel):
    """Powers q^k for k = kmin..kmax."""

    kind: Literal["qpow"] = "qpow"
    q: float
    kmin: int = 0
    kmax: int


class ExplicitGridSpec(BaseModel):
    kind: Literal["explicit"] = "explicit"
    points: list[float]


class LogGridSpec(BaseModel):
    """The scale {ln n : n_min <= n <= n_max}."""

    kind: Literal["log"] = "log"
    n_min: int = 1
    n_max: int


GridSpec = Annotated[
    Union[UniformGridSpec, QPowGridSpec, ExplicitGridSpec, LogGridSpec],
    Field(discriminator="kind"),
]


@dataclass(frozen=True, eq=False)
class TimeScaleGrid:
    """A bounded isolated time scale t_0 < t_1 < ... < t_N.

    The forward jump of the last point is the point itself, so its graininess
    is zero; every other graininess is strictly positive.
    """

    points: np.ndarray
    spec: BaseModel | None = None
    _index: dict[float, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1:
            raise GridConfigError("grid points must form a one-dimensional sequence")
        if pts.size < MIN_POINTS:
            raise GridConfigError(
                f"a grid needs at least {MIN_POINTS} points, got {pts.size}"
            )
        if not np.all(np.isfinite(pts)):
            raise GridConfigError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise GridConfigError("grid points must be strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {float(t): i for i, t in enumerate(pts)})

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    @property
    def kappa_size(self) -> int:
        """Number of points in the kappa-domain, i.e. without b."""
        return len(self) - 1

    @property
    def kappa2_size(self) -> int:
        return len(self) - 2

    @property
    def mu_values(self) -> np.ndarray:
        """Graininess at every point, with mu(b) = 0."""
        mu = np.empty_like(self.points)
        mu[:-1] = np.diff(self.points)
        mu[-1] = 0.0
        return mu

    @property
    def sigma_values(self) -> np.ndarray:
        sigma = np.empty_like(self.points)
        sigma[:-1] = self.points[1:]
        sigma[-1] = self.points[-1]
        return sigma

    @property
    def rho_values(self) -> np.ndarray:
        rho = np.empty_like(self.points)
        rho[1:] = self.points[:-1]
        rho[0] = self.points[0]
        return rho

    def index_of(self, t: float) -> int:
        try:
            return self._index[float(t)]
        except KeyError:
            raise GridDomainError(f"t={float(t)!r} is not a point of the grid") from None

    def contains(self, t: float) -> bool:
        return float(t) in self._index

    def sigma(self, t: float) -> float:
        i = self.index_of(t)
        return float(self.points[min(i + 1, len(self) - 1)])

    def rho(self, t: float) -> float:
        i = self.index_of(t)
        return float(self.points[max(i - 1, 0)])

    def mu(self, t: float) -> float:
        return self.sigma(t) - float(t)

    def domain_size(self, domain: Domain) -> int:
        return {"full": len(self), "kappa": self.kappa_size, "kappa2": self.kappa2_size}[domain]

    def uniform_step(self) -> float | None:
        """Return h when the grid is an hZ segment, otherwise ``None``."""

        if isinstance(self.spec, UniformGridSpec):
            return float(self.spec.h)
        mu = np.diff(self.points)
        h = float(mu[0])
        if np.all(np.abs(mu - h) <= FAMILY_TOLERANCE * abs(h)):
            return h
        return None

    def power_ratio(self) -> float | None:
        """Return q when every point is q times its predecessor, otherwise ``None``."""

        if isinstance(self.spec, QPowGridSpec):
            return float(self.spec.q)
        if self.points[0] <= 0:
            return None
        ratios = self.points[1:] / self.points[:-1]
        q = float(ratios[0])
        if q > 1 and np.all(np.abs(ratios - q) <= FAMILY_TOLERANCE * q):
            return q
        return None


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values attached to a prefix of a grid.

    A function on the full grid carries one value per point; functions on the
    kappa- and kappa^2-domains drop the last one or two points.
    """

    grid: TimeScaleGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise GridDomainError("grid function values must be a non-empty sequence")
        if vals.size > len(self.grid):
            raise GridDomainError(
                f"{vals.size} values do not fit a grid of {len(self.grid)} points"
            )
        if not np.all(np.isfinite(vals)):
            raise GridDomainError("grid function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(
        cls,
        grid: TimeScaleGrid,
        func: Callable[[float], float],
        domain: Domain = "full",
    ) -> GridFunction:
        size = grid.domain_size(domain)
        return cls(grid, np.array([func(float(t)) for t in grid.points[:size]]))

    @classmethod
    def constant(cls, grid: TimeScaleGrid, value: float, domain: Domain = "full") -> GridFunction:
        return cls(grid, np.full(grid.domain_size(domain), float(value)))

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, index: int) -> float:
        return float(self.values[index])

    @property
    def points(self) -> np.ndarray:
        return self.grid.points[: len(self)]

    @property
    def domain(self) -> Domain | None:
        for name in ("full", "kappa", "kappa2"):
            if len(self) == self.grid.domain_size(name):  # type: ignore[arg-type]
                return name  # type: ignore[return-value]
        return None

    def at(self, t: float) -> float:
        i = self.grid.index_of(t)
        if i >= len(self):
            raise GridDomainError(f"t={float(t)!r} lies outside the domain of this function")
        return float(self.values[i])

    def restrict(self, size: int) -> GridFunction:
        if size > len(self):
            raise GridDomainError(f"cannot restrict {len(self)} values to {size}")
        return GridFunction(self.grid, self.values[:size])

    def kappa(self) -> GridFunction:
        return self.restrict(self.grid.kappa_size)

    def kappa2(self) -> GridFunction:
        return self.restrict(self.grid.kappa2_size)

    def _coerce(self, other: GridFunction | float) -> np.ndarray | float:
        if isinstance(other, GridFunction):
            if other.grid is not self.grid or len(other) != len(self):
                raise GridDomainError("grid functions live on different domains")
            return other.values
        return float(other)

    def __add__(self, other: GridFunction | float) -> GridFunction:
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: GridFunction | float) -> GridFunction:
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __mul__(self, other: GridFunction | float) -> GridFunction:
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> GridFunction:
        return GridFunction(self.grid, -self.values)


def sigma(grid: TimeScaleGrid, t: float) -> float:
    return grid.sigma(t)


def rho(grid: TimeScaleGrid, t: float) -> float:
    return grid.rho(t)


def mu(grid: TimeScaleGrid, t: float) -> float:
    return grid.mu(t)


def dagger(alpha: float) -> float:
    """Reciprocal extended by 0 -> 0."""
    return 0.0 if alpha == 0 else 1.0 / alpha


def dagger_values(alpha: np.ndarray) -> np.ndarray:
    out = np.zeros_like(alpha, dtype=float)
    nonzero = alpha != 0
    out[nonzero] = 1.0 / alpha[nonzero]
    return out


def delta_derivative(f: GridFunction) -> GridFunction:
    """Forward difference quotient (f(sigma(t)) - f(t)) / mu(t).

    The result lives on one point fewer than ``f``: a function on the full
    grid yields a function on the kappa-domain.
    """

    if len(f) < 2:
        raise GridDomainError("a delta derivative needs values at two consecutive points")
    mu_vals = f.grid.mu_values[: len(f) - 1]
    return GridFunction(f.grid, np.diff(f.values) / mu_vals)


def delta_integral(f: GridFunction, lo: float, hi: float) -> float:
    """Sum of mu(t) f(t) over grid points t in [lo, hi)."""

    grid = f.grid
    i_lo = grid.index_of(lo)
    i_hi = grid.index_of(hi)
    if i_lo > i_hi:
        raise GridDomainError(f"integration bounds are reversed: {lo!r} > {hi!r}")
    if i_hi > len(f):
        raise GridDomainError(f"integrand is not defined on [{lo!r}, {hi!r})")
    return float(np.dot(grid.mu_values[i_lo:i_hi], f.values[i_lo:i_hi]))


def delta_antiderivative(f: GridFunction) -> GridFunction:
    """F(t_k) = integral of f over [a, t_k), defined on the points 0..len(f)."""

    size = min(len(f) + 1, len(f.grid))
    terms = f.grid.mu_values[: size - 1] * f.values[: size - 1]
    cumulative = np.concatenate(([0.0], np.cumsum(terms)))
    return GridFunction(f.grid, cumulative)


def uniform_grid(a: float, b: float, h: float) -> TimeScaleGrid:
    return build_grid(UniformGridSpec(a=a, b=b, h=h))


def qpow_grid(q: float, kmin: int, kmax: int) -> TimeScaleGrid:
    return build_grid(QPowGridSpec(q=q, kmin=kmin, kmax=kmax))


def explicit_grid(points: Sequence[float]) -> TimeScaleGrid:
    return build_grid(ExplicitGridSpec(points=list(points)))


def build_grid(spec: UniformGridSpec | QPowGridSpec | ExplicitGridSpec | LogGridSpec) -> TimeScaleGrid:
    """Materialize a grid specification, rejecting non-conforming parameters."""

    if isinstance(spec, UniformGridSpec):
        if not spec.b > spec.a:
            raise GridConfigError(f"uniform grid needs a < b, got a={spec.a}, b={spec.b}")
        steps = (spec.b - spec.a) / spec.h
        count = round(steps)
        if abs(steps - count) > UNIFORM_SLACK * max(1.0, abs(steps)):
            raise GridConfigError(
                f"b - a = {spec.b - spec.a} is not an integer multiple of h = {spec.h}"
            )
        points = spec.a + spec.h * np.arange(count + 1, dtype=float)
        points[-1] = spec.b
        return TimeScaleGrid(points, spec)

    if isinstance(spec, QPowGridSpec):
        if not spec.q > 1:
            raise GridConfigError(f"q-power grid needs q > 1, got q={spec.q}")
        if spec.kmax <= spec.kmin:
            raise GridConfigError("q-power grid needs kmin < kmax")
        exponents = np.arange(spec.kmin, spec.kmax + 1, dtype=float)
        return TimeScaleGrid(np.power(float(spec.q), exponents), spec)

    if isinstance(spec, LogGridSpec):
        if spec.n_min < 1 or spec.n_max <= spec.n_min:
            raise GridConfigError("log grid needs 1 <= n_min < n_max")
        return TimeScaleGrid(
            np.array([math.log(n) for n in range(spec.n_min, spec.n_max + 1)]), spec
        )

    if isinstance(spec, ExplicitGridSpec):
        return TimeScaleGrid(np.array(spec.points, dtype=float), spec)

    raise GridConfigError(f"unsupported grid specification {spec!r}")


def grid_table(grid: TimeScaleGrid) -> list[dict[str, float]]:
    """Rows of (index, t, sigma, mu) for CSV export."""

    return [
        {"index": i, "t": float(t), "sigma": float(s), "mu": float(m)}
        for i, (t, s, m) in enumerate(zip(grid.points, grid.sigma_values, grid.mu_values))
    ]


__all__ = [
    "Domain",
    "ExplicitGridSpec",
    "GridFunction",
    "GridSpec",
    "LogGridSpec",
    "QPowGridSpec",
    "TimeScaleGrid",
    "UniformGridSpec",
    "build_grid",
    "dagger",
    "dagger_values",
    "delta_antiderivative",
    "delta_derivative",
    "delta_integral",
    "explicit_grid",
    "grid_table",
    "mu",
    "qpow_grid",
    "rho",
    "sigma",
    "uniform_grid",
]
