"""Exact p-adic arithmetic on rationals.

Valuations, norms and canonical digit expansions are computed with
:class:`fractions.Fraction` and integer division only; nothing here touches
floating point except the optional lossy conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Union

from .errors import ZeroInputError

RationalLike = Union[int, Fraction, str]

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeBase:
    """A prime ``p``; primality is checked by trial division."""

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise TypeError(f"prime must be an int, got {type(self.p).__name__}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __int__(self):
        return self.p


def as_base(base: PrimeBase | int) -> PrimeBase:
    return base if isinstance(base, PrimeBase) else PrimeBase(int(base))


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and strings such as ``"-3/4"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    if isinstance(x, float):
        # exact binary value; callers wanting decimals should pass strings
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def _int_valuation(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def valuation(x: RationalLike, base: PrimeBase | int) -> int | float:
    """Exponent of ``p`` in ``x``; ``math.inf`` for zero."""
    x = as_rational(x)
    p = as_base(base).p
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def padic_norm(x: RationalLike, base: PrimeBase | int) -> Fraction:
    """``|x|_p = p**(-valuation)`` as an exact Fraction (0 for x = 0)."""
    g = valuation(x, base)
    if g == INF:
        return Fraction(0)
    return Fraction(as_base(base).p) ** (-g)


def unit_part(x: RationalLike, base: PrimeBase | int) -> Fraction:
    """The factor ``m/n`` of ``x = p**g * m/n`` with ``p`` dividing neither."""
    x = as_rational(x)
    if x == 0:
        raise ZeroInputError("zero has no unit part")
    p = as_base(base).p
    return x / Fraction(p) ** valuation(x, p)


def digit_expansion(x: RationalLike, base: PrimeBase | int, n: int) -> tuple[int, list[int]]:
    """First ``n`` digits of the canonical expansion ``x = p**g * sum a_j p**j``.

    Returns ``(g, [a_0, ..., a_{n-1}])`` with ``a_0 != 0``. Each digit is the
    residue of the current unit part mod ``p``, using the modular inverse of
    its denominator; the residue is then peeled off and the rest divided by p.
    """
    x = as_rational(x)
    if x == 0:
        raise ZeroInputError("zero has no canonical expansion")
    if n < 1:
        raise ValueError("need at least one digit")
    p = as_base(base).p
    g = valuation(x, p)
    u = x / Fraction(p) ** g
    digits = []
    for _ in range(n):
        a = (u.numerator * pow(u.denominator, -1, p)) % p
        digits.append(a)
        u = (u - a) / p
    return g, digits


def partial_sum(g: int, digits: list[int], base: PrimeBase | int) -> Fraction:
    p = as_base(base).p
    return Fraction(p) ** g * sum(Fraction(a) * p**j for j, a in enumerate(digits))


@dataclass(frozen=True)
class Ball:
    """The ball ``|x|_p <= p**gamma`` about the origin."""

    gamma: int


@dataclass(frozen=True)
class Sphere:
    """The sphere ``|x|_p == p**gamma`` about the origin."""

    gamma: int


def haar_measure(region: Ball | Sphere, base: PrimeBase | int, exact: bool = True):
    """Haar measure normalised so the unit ball has measure one."""
    p = Fraction(as_base(base).p)
    if isinstance(region, Ball):
        m = p**region.gamma
    elif isinstance(region, Sphere):
        m = p**region.gamma * (1 - 1 / p)
    else:
        raise TypeError(f"unknown region {region!r}")
    return m if exact else float(m)


@dataclass(frozen=True)
class PAdicScalar:
    """An exact rational viewed as an element of Q_p."""

    value: Fraction
    base: PrimeBase

    def __post_init__(self):
        object.__setattr__(self, "value", as_rational(self.value))
        object.__setattr__(self, "base", as_base(self.base))

    @classmethod
    def of(cls, x: RationalLike, base: PrimeBase | int) -> "PAdicScalar":
        return cls(as_rational(x), as_base(base))

    @cached_property
    def valuation(self) -> int | float:
        return valuation(self.value, self.base)

    @property
    def norm(self) -> Fraction:
        if self.valuation == INF:
            return Fraction(0)
        return Fraction(self.base.p) ** (-self.valuation)

    def digits(self, n: int) -> tuple[int, list[int]]:
        return digit_expansion(self.value, self.base, n)

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PAdicScalar):
            if other.base != self.base:
                raise ValueError("cannot mix different primes")
            return other.value
        return as_rational(other)

    def __add__(self, other):
        return PAdicScalar(self.value + self._coerce(other), self.base)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicScalar(self.value - self._coerce(other), self.base)

    def __rsub__(self, other):
        return PAdicScalar(self._coerce(other) - self.value, self.base)

    def __mul__(self, other):
        return PAdicScalar(self.value * self._coerce(other), self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        d = self._coerce(other)
        if d == 0:
            raise ZeroDivisionError("division by zero")
        return PAdicScalar(self.value / d, self.base)

    def __neg__(self):
        return PAdicScalar(-self.value, self.base)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return f"{self.value} in Q_{self.base.p}"
