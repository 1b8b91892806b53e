"""Exact arithmetic over the Gaussian rationals Q(i).

Real and imaginary parts are ``gmpy2.mpq`` values, so every operation is
exact. Strings of the form ``"p/q"`` (or plain integers) are the canonical
text representation of a rational.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)


def parse_rational(value) -> mpq:
    """Convert ``value`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq`` and strings like ``"3"``, ``"-2/5"``.
    Floats are rejected: the exact path never silently rounds.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, type(_ZERO))):
        return mpq(value)
    if isinstance(value, (Fraction, Rational)):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            if "/" in text:
                num, den = text.split("/")
                return mpq(int(num), int(den))
            return mpq(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    if isinstance(value, GaussianRational):
        if value.im != 0:
            raise ValueError(f"{value} is not real")
        return value.re
    raise TypeError(f"cannot interpret {type(value).__name__} {value!r} as an exact rational")


def rational_str(x) -> str:
    """Canonical ``p/q`` text for an exact rational (integers print bare)."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """Element ``re + i*im`` of Q(i) with exact field arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO) else parse_rational(re)
        self.im = im if type(im) is type(_ZERO) else parse_rational(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(parse_rational(value[0]), parse_rational(value[1]))
        return cls(parse_rational(value), _ZERO)

    @classmethod
    def i(cls) -> "GaussianRational":
        return cls(_ZERO, _ONE)

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0 and d == 0:
            return GaussianRational(a * c, _ZERO)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if self.im == 0:
            if self.re == 0:
                raise ZeroDivisionError("inverse of zero in Q(i)")
            return GaussianRational(1 / self.re, _ZERO)
        n = self.norm2()
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = GaussianRational(_ONE, _ZERO)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if self.im == 0:
            return rational_str(self.re)
        if self.re == 0:
            return f"{rational_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{rational_str(self.re)}{sign}{rational_str(abs(self.im))}i"

    # serialization --------------------------------------------------------
    def to_json(self):
        """Real values serialize as ``"p/q"``; complex ones as ``["p/q", "r/s"]``."""
        if self.im == 0:
            return rational_str(self.re)
        return [rational_str(self.re), rational_str(self.im)]

    @classmethod
    def from_json(cls, data) -> "GaussianRational":
        return cls.coerce(data)


def _lift(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, (int, type(_ZERO), Fraction)):
        return GaussianRational(mpq(value), _ZERO)
    if isinstance(value, Rational):
        return GaussianRational(mpq(value.numerator, value.denominator), _ZERO)
    return NotImplemented


ZERO = GaussianRational(_ZERO, _ZERO)
ONE = GaussianRational(_ONE, _ZERO)
I = GaussianRational(_ZERO, _ONE)


def gq(value) -> GaussianRational:
    """Shorthand coercion to :class:`GaussianRational`."""
    return GaussianRational.coerce(value)


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, GaussianRational, type(_ZERO))) and not isinstance(value, bool)


__all__ = [
    "GaussianRational",
    "ZERO",
    "ONE",
    "I",
    "gq",
    "parse_rational",
    "rational_str",
    "is_exact",
]
