"""The p-adic solenoid Z[1/p] \\ (R x Q_p) over the circle.

Points are kept in the canonical form ``base in [0, P)``, ``fiber in P*Z_p``
where ``P = p**level`` (``level = 0`` is the usual solenoid over R/Z).  Both
coordinates are exact rationals, so the flow law and the projection identity
hold exactly; :attr:`SolenoidPoint.fiber` gives the truncated p-adic view.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from sympy import isprime

from .errors import DepthExceedsPrecision, NotPrime
from .padic import DEFAULT_PRECISION, PAdicValue, RationalLike, from_rational, rational_valuation


def _residue(r: Fraction, modulus: int) -> int:
    return r.numerator * pow(r.denominator, -1, modulus) % modulus


@dataclass(frozen=True)
class SolenoidPoint:
    prime: int
    base: Fraction
    fiber_rational: Fraction
    precision: int = DEFAULT_PRECISION
    level: int = 0

    def __post_init__(self):
        if not isprime(self.prime):
            raise NotPrime(f"{self.prime} is not a prime")
        if not 0 <= self.base < self.period:
            raise ValueError(f"base {self.base} outside [0, {self.period})")
        if rational_valuation(self.fiber_rational, self.prime) < self.level:
            raise ValueError(f"fiber {self.fiber_rational} not in p^{self.level} Z_p")

    @property
    def period(self) -> int:
        return self.prime ** self.level

    @property
    def fiber(self) -> PAdicValue:
        return from_rational(self.fiber_rational, self.prime, self.precision)

    def projection(self) -> Fraction:
        """Image on the circle R / (period * Z)."""
        return self.base

    def fiber_residue(self, depth: int) -> int:
        if depth > self.precision:
            raise DepthExceedsPrecision(f"depth {depth} > precision {self.precision}")
        return _residue(self.fiber_rational, self.prime ** depth)


def _fractional_part(x: Fraction, p: int, level: int) -> Fraction:
    """The ``f`` in Z[1/p] with ``0 <= f < p**level`` and ``x - f`` in ``p**level Z_p``."""
    s = max(0, -rational_valuation(x, p)) if x else 0
    t = x * p ** s
    return Fraction(_residue(t, p ** (s + level)), p ** s)


def canonicalize(x_inf: RationalLike, x_p: RationalLike, p: int,
                 precision: int = DEFAULT_PRECISION, level: int = 0) -> SolenoidPoint:
    """Canonical representative of the class ``Z[1/p] + (x_inf, x_p)``.

    First shift by ``z`` in Z[1/p] so the fiber lands in ``p**level Z_p``;
    that ``z`` is unique modulo ``p**level Z``, and the remaining integer
    shift brings the base into ``[0, p**level)``.
    """
    x_inf, x_p = Fraction(x_inf), Fraction(x_p)
    f = _fractional_part(x_p, p, level)
    base, fiber = x_inf - f, x_p - f
    period = p ** level
    n = math.floor(base / period) * period
    return SolenoidPoint(p, base - n, fiber - n, precision, level)


def flow(pt: SolenoidPoint, t: RationalLike) -> SolenoidPoint:
    """The lift of the rotation ``x -> x + t`` of the base circle."""
    return canonicalize(pt.base + Fraction(t), pt.fiber_rational, pt.prime, pt.precision, pt.level)


def orbit(pt: SolenoidPoint, steps: int) -> Iterator[tuple[int, SolenoidPoint]]:
    """Returns to the fiber of ``pt`` at times ``0, P, 2P, ...`` (``P`` the period)."""
    for j in range(steps):
        t = j * pt.period
        yield t, flow(pt, t)


def cylinder_histogram(pt: SolenoidPoint, depth: int, steps: int) -> dict[int, int]:
    """Counts of the fiber mod ``p**depth`` over the first ``steps`` returns.

    Every residue class mod ``p**depth`` is listed, including empty ones.
    """
    if depth > pt.precision:
        raise DepthExceedsPrecision(f"depth {depth} > precision {pt.precision}")
    hist = Counter(q.fiber_residue(depth) for _, q in orbit(pt, steps))
    return {r: hist.get(r, 0) for r in range(pt.prime ** depth)}
