"""Fixed-precision arithmetic in Z_p and Q_p.

A nonzero value is stored as ``p**valuation * unit`` where ``unit`` is known
modulo ``p**precision``.  Exact zero is kept apart (valuation ``INFINITY``) so
that rational inputs never have to pretend a zero is "small enough".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from sympy import factorint, isprime

from .errors import DivisionByZero, MismatchedPrime, NotPrime, PrecisionExhausted, ZeroInput

DEFAULT_PRECISION = 32
INFINITY = math.inf

RationalLike = Union[int, Fraction]


def valuation(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ZeroInput("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(r: RationalLike, p: int) -> int | float:
    r = Fraction(r)
    if r == 0:
        return INFINITY
    return valuation(r.numerator, p) - valuation(r.denominator, p)


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not isprime(p):
        raise NotPrime(f"{p!r} is not a prime")


@dataclass(frozen=True)
class PAdicValue:
    """Truncated p-adic number ``prime**valuation * unit_digits``.

    ``unit_digits`` lies in ``[1, prime**precision)`` and is prime to
    ``prime``; the value is known modulo ``prime**(valuation + precision)``.
    """

    prime: int
    valuation: int | float
    unit_digits: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if self.valuation == INFINITY:
            if self.unit_digits != 0:
                raise ValueError("exact zero carries no unit digits")
            return
        if not 0 < self.unit_digits < self.prime ** self.precision:
            raise ValueError("unit digits out of range")
        if self.unit_digits % self.prime == 0:
            raise ValueError("unit digits must be prime to p")

    # construction

    @classmethod
    def zero(cls, p: int, precision: int = DEFAULT_PRECISION) -> PAdicValue:
        return cls(p, INFINITY, 0, precision)

    @classmethod
    def from_rational(cls, r: RationalLike, p: int, precision: int = DEFAULT_PRECISION) -> PAdicValue:
        return from_rational(r, p, precision)

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.valuation == INFINITY

    @property
    def modulus(self) -> int:
        """``p**precision``, the modulus of the unit part."""
        return self.prime ** self.precision

    @property
    def absolute_precision(self) -> int | float:
        """The value is known modulo ``p**absolute_precision``."""
        return self.valuation + self.precision

    def norm(self) -> Fraction:
        """``|x|_p`` as an exact rational."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        out, u = [], self.unit_digits
        for _ in range(self.precision):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def residue(self, depth: int) -> int:
        """The value mod ``p**depth`` for an element of Z_p."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("residue requires an element of Z_p")
        if depth > self.absolute_precision:
            raise PrecisionExhausted(f"only {self.absolute_precision} digits are known")
        return (self.prime ** self.valuation * self.unit_digits) % self.prime ** depth

    def agrees_with(self, other: PAdicValue) -> bool:
        """Equality modulo the coarser of the two absolute precisions."""
        _same_prime(self, other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        p = self.prime
        shift = min(self.valuation, other.valuation)
        n = min(self.absolute_precision, other.absolute_precision) - shift
        a = self.unit_digits * p ** (self.valuation - shift)
        b = other.unit_digits * p ** (other.valuation - shift)
        return (a - b) % p ** n == 0

    # arithmetic

    def _coerce(self, other) -> PAdicValue:
        if isinstance(other, PAdicValue):
            _same_prime(self, other)
            return other
        if isinstance(other, (int, Rational)):
            return from_rational(Fraction(other), self.prime, self.precision)
        return NotImplemented

    def __neg__(self) -> PAdicValue:
        if self.is_zero:
            return self
        return PAdicValue(self.prime, self.valuation, (-self.unit_digits) % self.modulus, self.precision)

    def __add__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, -other)

    def __rsub__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(other, -self)

    def __mul__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, inv(other))

    def __rtruediv__(self, other) -> PAdicValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(other, inv(self))

    def __str__(self) -> str:
        if self.is_zero:
            return f"0 (p={self.prime})"
        return f"{self.prime}^{self.valuation} * {self.unit_digits} mod {self.prime}^{self.precision}"


def _same_prime(a: PAdicValue, b: PAdicValue) -> None:
    if a.prime != b.prime:
        raise MismatchedPrime(f"p={a.prime} vs p={b.prime}")


def from_rational(r: RationalLike, p: int, precision: int = DEFAULT_PRECISION) -> PAdicValue:
    """Image of the rational ``r`` in Q_p, truncated to ``precision`` digits."""
    _check_prime(p)
    r = Fraction(r)
    if r == 0:
        return PAdicValue.zero(p, precision)
    num, den = r.numerator, r.denominator
    a, b = valuation(num, p), valuation(den, p)
    mod = p ** precision
    unit = (num // p ** a) * pow(den // p ** b, -1, mod) % mod
    return PAdicValue(p, a - b, unit, precision)


def add(a: PAdicValue, b: PAdicValue) -> PAdicValue:
    """Sum of two p-adic values.

    The result is only known to the coarser absolute precision of the
    inputs, and any leading digits that cancel are dropped from its
    ``precision``.
    """
    _same_prime(a, b)
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    p = a.prime
    low = min(a.valuation, b.valuation)
    rel = min(a.absolute_precision, b.absolute_precision) - low
    s = (a.unit_digits * p ** (a.valuation - low) + b.unit_digits * p ** (b.valuation - low)) % p ** rel
    if s == 0:
        raise PrecisionExhausted(f"all {rel} known digits cancelled")
    t = valuation(s, p)
    return PAdicValue(p, low + t, s // p ** t, rel - t)


def mul(a: PAdicValue, b: PAdicValue) -> PAdicValue:
    _same_prime(a, b)
    k = min(a.precision, b.precision)
    if a.is_zero or b.is_zero:
        return PAdicValue.zero(a.prime, k)
    return PAdicValue(a.prime, a.valuation + b.valuation, a.unit_digits * b.unit_digits % a.prime ** k, k)


def inv(a: PAdicValue) -> PAdicValue:
    if a.is_zero:
        raise DivisionByZero("inverse of exact zero")
    return PAdicValue(a.prime, -a.valuation, pow(a.unit_digits, -1, a.modulus), a.precision)


@dataclass(frozen=True)
class Place:
    """A place of Q: ``INF`` (the real place) or a prime."""

    tag: int | str

    INF = "inf"

    def __post_init__(self):
        if self.tag != Place.INF:
            _check_prime(self.tag)

    @classmethod
    def infinity(cls) -> Place:
        return cls(cls.INF)

    @property
    def is_infinite(self) -> bool:
        return self.tag == Place.INF

    def __str__(self) -> str:
        return "inf" if self.is_infinite else str(self.tag)


def abs_at_place(r: RationalLike, place: Place) -> Fraction:
    """``|r|`` at ``place`` as an exact rational."""
    r = Fraction(r)
    if place.is_infinite:
        return abs(r)
    if r == 0:
        return Fraction(0)
    return Fraction(place.tag) ** (-rational_valuation(r, place.tag))


def relevant_places(r: RationalLike) -> list[Place]:
    """The real place followed by the primes dividing numerator or denominator."""
    r = Fraction(r)
    primes = set(factorint(abs(r.numerator))) | set(factorint(r.denominator))
    return [Place.infinity()] + [Place(p) for p in sorted(primes)]


def local_absolute_values(r: RationalLike) -> dict[Place, Fraction]:
    if Fraction(r) == 0:
        raise ZeroInput("the product formula needs a nonzero rational")
    return {place: abs_at_place(r, place) for place in relevant_places(r)}


def product_formula_check(r: RationalLike) -> Fraction:
    """Product of ``|r|_v`` over all places; equals 1 for every nonzero ``r``.

    Places not listed by :func:`relevant_places` contribute a factor 1.
    """
    return math.prod(local_absolute_values(r).values(), start=Fraction(1))
