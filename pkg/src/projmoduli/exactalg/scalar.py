"""Gaussian rationals: exact elements of Q(i).

A value is stored as ``(re_num + im_num*i) / den`` with ``den > 0`` and
``gcd(re_num, im_num, den) == 1``, which makes the representation canonical.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Union

ScalarLike = Union["Scalar", int, Fraction]


class Scalar:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(gcd(a, b), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "Scalar":
        out = cls.__new__(cls)
        out._set(a, b, d)
        return out

    @classmethod
    def coerce(cls, value: ScalarLike) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, float):
            return cls(Fraction(value))
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar")

    @classmethod
    def i(cls) -> "Scalar":
        return cls._raw(0, 1, 1)

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_one(self) -> bool:
        return self._a == 1 and self._b == 0 and self._d == 1

    def is_real(self) -> bool:
        return self._b == 0

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self._a, -self._b, self._d)

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __add__(self, other: ScalarLike) -> "Scalar":
        o = Scalar.coerce(other)
        if self._d == o._d:
            return Scalar._raw(self._a + o._a, self._b + o._b, self._d)
        return Scalar._raw(self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, self._d * o._d)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self._a, -self._b, self._d)

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> "Scalar":
        o = Scalar.coerce(other)
        return Scalar._raw(self._a * o._a - self._b * o._b, self._a * o._b + self._b * o._a, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("inverse of zero Scalar")
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        return Scalar._raw(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other: ScalarLike) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar._raw(1, 0, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Rational)):
            return self == Scalar(Fraction(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._a, self._b, self._d))

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()})"

    def to_text(self) -> str:
        """Grammar-compatible text, e.g. ``3/4``, ``-2*i``, ``(1/2+3*i)``."""
        re, im = self.re, self.im
        if im == 0:
            return _frac_text(re)
        if re == 0:
            return "i" if im == 1 else ("-i" if im == -1 else f"{_frac_text(im)}*i")
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        imag = "i" if mag == 1 else f"{_frac_text(mag)}*i"
        return f"({_frac_text(re)}{sign}{imag})"


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar.i()
