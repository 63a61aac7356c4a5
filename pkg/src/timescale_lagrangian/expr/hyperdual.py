"""Second-order forward differentiation numbers in two seed directions (x, v).

A ``HyperDual`` carries a value together with its first and second partial
derivatives in x and v. There is one mixed slot, so d_xv == d_vx holds by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

Scalar = Union[int, float]


@dataclass(frozen=True, slots=True)
class HyperDual:
    value: float
    d_x: float = 0.0
    d_v: float = 0.0
    d_xx: float = 0.0
    d_xv: float = 0.0
    d_vv: float = 0.0

    @classmethod
    def constant(cls, value: float) -> HyperDual:
        return cls(float(value))

    @classmethod
    def seed_x(cls, value: float) -> HyperDual:
        return cls(float(value), d_x=1.0)

    @classmethod
    def seed_v(cls, value: float) -> HyperDual:
        return cls(float(value), d_v=1.0)

    @property
    def is_constant(self) -> bool:
        return not (self.d_x or self.d_v or self.d_xx or self.d_xv or self.d_vv)

    def partials(self) -> tuple[float, float, float, float, float, float]:
        return (self.value, self.d_x, self.d_v, self.d_xx, self.d_xv, self.d_vv)

    def chain(self, f0: float, f1: float, f2: float) -> HyperDual:
        """Compose with a scalar function whose value, f' and f'' at self.value are given."""

        return HyperDual(
            f0,
            f1 * self.d_x,
            f1 * self.d_v,
            f2 * self.d_x * self.d_x + f1 * self.d_xx,
            f2 * self.d_x * self.d_v + f1 * self.d_xv,
            f2 * self.d_v * self.d_v + f1 * self.d_vv,
        )

    def __add__(self, other: HyperDual | Scalar) -> HyperDual:
        if isinstance(other, HyperDual):
            return HyperDual(
                self.value + other.value,
                self.d_x + other.d_x,
                self.d_v + other.d_v,
                self.d_xx + other.d_xx,
                self.d_xv + other.d_xv,
                self.d_vv + other.d_vv,
            )
        return HyperDual(self.value + other, self.d_x, self.d_v, self.d_xx, self.d_xv, self.d_vv)

    __radd__ = __add__

    def __neg__(self) -> HyperDual:
        return HyperDual(-self.value, -self.d_x, -self.d_v, -self.d_xx, -self.d_xv, -self.d_vv)

    def __sub__(self, other: HyperDual | Scalar) -> HyperDual:
        return self + (-other)

    def __rsub__(self, other: Scalar) -> HyperDual:
        return (-self) + other

    def __mul__(self, other: HyperDual | Scalar) -> HyperDual:
        if isinstance(other, HyperDual):
            a, b = self, other
            return HyperDual(
                a.value * b.value,
                a.d_x * b.value + a.value * b.d_x,
                a.d_v * b.value + a.value * b.d_v,
                a.d_xx * b.value + 2.0 * a.d_x * b.d_x + a.value * b.d_xx,
                a.d_xv * b.value + a.d_x * b.d_v + a.d_v * b.d_x + a.value * b.d_xv,
                a.d_vv * b.value + 2.0 * a.d_v * b.d_v + a.value * b.d_vv,
            )
        return HyperDual(
            self.value * other,
            self.d_x * other,
            self.d_v * other,
            self.d_xx * other,
            self.d_xv * other,
            self.d_vv * other,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> HyperDual:
        u = self.value
        if u == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))

    def __truediv__(self, other: HyperDual | Scalar) -> HyperDual:
        if isinstance(other, HyperDual):
            return self * other.reciprocal()
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other: Scalar) -> HyperDual:
        return self.reciprocal() * other

    def int_power(self, n: int) -> HyperDual:
        u = self.value
        if u == 0 and n < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        f0 = u**n
        f1 = n * u ** (n - 1) if n != 0 else 0.0
        f2 = n * (n - 1) * u ** (n - 2) if n not in (0, 1) else 0.0
        return self.chain(float(f0), float(f1), float(f2))

    def exp(self) -> HyperDual:
        e = math.exp(self.value)
        return self.chain(e, e, e)

    def log(self) -> HyperDual:
        u = self.value
        if u <= 0:
            raise ValueError("logarithm of a non-positive number")
        return self.chain(math.log(u), 1.0 / u, -1.0 / (u * u))

    def sqrt(self) -> HyperDual:
        u = self.value
        if u <= 0:
            raise ValueError("square root needs a positive argument")
        r = math.sqrt(u)
        return self.chain(r, 0.5 / r, -0.25 / (r * u))

    def sin(self) -> HyperDual:
        s, c = math.sin(self.value), math.cos(self.value)
        return self.chain(s, c, -s)

    def cos(self) -> HyperDual:
        s, c = math.sin(self.value), math.cos(self.value)
        return self.chain(c, -s, -c)

    def __pow__(self, other: HyperDual | Scalar) -> HyperDual:
        exponent = other if isinstance(other, HyperDual) else HyperDual.constant(other)
        if exponent.is_constant and float(exponent.value).is_integer():
            return self.int_power(int(exponent.value))
        if self.value <= 0:
            raise ValueError("real powers need a positive base")
        return (exponent * self.log()).exp()

    def __rpow__(self, base: Scalar) -> HyperDual:
        return HyperDual.constant(base) ** self


__all__ = ["HyperDual"]
