"""Exact rational points of the upper half-plane and the modular surface X(1).

Points are reduced to the standard fundamental domain of PSL(2, Z) with the
half-open convention ``-1/2 <= x < 1/2``, ``|z| >= 1``, and ``x <= 0`` on the
unit circle, so two points are equal in X(1) iff their reduced forms are
equal as pairs of rationals.

Internally the hot loops work on integer triples ``(X, Y, D)`` standing for
``z = (X + iY) / D`` with ``D > 0`` and ``gcd(X, Y, D) == 1``; this avoids the
normalisation overhead of :class:`fractions.Fraction` in every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable

from scipy import integrate

from .errors import RegionOutsideDomain, SingularMatrix

Triple = tuple[int, int, int]

HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class HPoint:
    """The point ``x + iy`` of the upper half-plane, with rational x and y."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.y <= 0:
            raise ValueError(f"y must be positive, got {self.y}")

    @property
    def is_reduced(self) -> bool:
        r = self.x * self.x + self.y * self.y
        if not -HALF <= self.x < HALF or r < 1:
            return False
        return r > 1 or self.x <= 0

    def to_triple(self) -> Triple:
        d = self.x.denominator * self.y.denominator // gcd(self.x.denominator, self.y.denominator)
        return (self.x.numerator * (d // self.x.denominator), self.y.numerator * (d // self.y.denominator), d)

    @classmethod
    def from_triple(cls, t: Triple) -> HPoint:
        X, Y, D = t
        return cls(Fraction(X, D), Fraction(Y, D))

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


I = HPoint(0, 1)


@dataclass(frozen=True)
class IntMatrix2:
    """Integer matrix ``(a b; c d)`` with nonzero determinant."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det == 0:
            raise SingularMatrix(f"{self} is singular")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: IntMatrix2) -> IntMatrix2:
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        return f"({self.a} {self.b}; {self.c} {self.d})"


IDENTITY = IntMatrix2(1, 0, 0, 1)
S = IntMatrix2(0, -1, 1, 0)
T = IntMatrix2(1, 1, 0, 1)


def _normalize(X: int, Y: int, D: int) -> Triple:
    g = gcd(gcd(X, Y), D)
    if g != 1:
        return X // g, Y // g, D // g
    return X, Y, D


def apply_triple(m: tuple[int, int, int, int], z: Triple) -> Triple:
    """``(az + b) / (cz + d)`` on a triple; orientation is fixed when det < 0."""
    a, b, c, d = m
    X, Y, D = z
    P, Q = a * X + b * D, a * Y
    R, U = c * X + d * D, c * Y
    return _normalize(P * R + Q * U, abs(Q * R - P * U), R * R + U * U)


def reduce_triple(X: int, Y: int, D: int) -> Triple:
    """Reduced representative of ``(X + iY) / D`` (no matrix bookkeeping)."""
    while True:
        n = (2 * X + D) // (2 * D)
        if n:
            X -= n * D
        r = X * X + Y * Y
        d2 = D * D
        if r < d2:
            X, Y, D = _normalize(-D * X, D * Y, r)
            continue
        if r == d2 and X > 0:
            X = -X
        return X, Y, D


def _reduce_with_matrix(X: int, Y: int, D: int) -> tuple[Triple, tuple[int, int, int, int]]:
    a, b, c, d = 1, 0, 0, 1
    while True:
        n = (2 * X + D) // (2 * D)
        if n:
            X -= n * D
            a, b = a - n * c, b - n * d
        r = X * X + Y * Y
        d2 = D * D
        if r < d2 or (r == d2 and X > 0):
            X, Y, D = _normalize(-D * X, D * Y, r)
            a, b, c, d = -c, -d, a, b
            if r < d2:
                continue
        return (X, Y, D), (a, b, c, d)


def moebius_apply(m: IntMatrix2, z: HPoint) -> HPoint:
    """Exact fractional-linear action of ``m`` on ``z``.

    For ``det(m) < 0`` the image is conjugated back into the upper half-plane.
    """
    if m.det == 0:
        raise SingularMatrix(str(m))
    return HPoint.from_triple(apply_triple(m.as_tuple(), z.to_triple()))


def reduce(z: HPoint) -> tuple[HPoint, IntMatrix2]:
    """Reduced representative of the PSL(2, Z)-orbit of ``z``.

    Returns the reduced point and an SL(2, Z) matrix ``m`` with
    ``moebius_apply(m, z) == reduced``.
    """
    t, m = _reduce_with_matrix(*z.to_triple())
    return HPoint.from_triple(t), IntMatrix2(*m)


def reduced(z: HPoint) -> HPoint:
    return HPoint.from_triple(reduce_triple(*z.to_triple()))


# Test functions and the normalised hyperbolic measure

DENSITY = 3 / math.pi  # dmu = (3/pi) dx dy / y^2 has total mass 1 on X(1)


@dataclass(frozen=True)
class TestFunction:
    """Indicator of a closed region inside the fundamental domain.

    ``kind`` is ``"ystrip"`` (``y >= c``), ``"box"``
    (``x0 <= x <= x1, y0 <= y <= y1``) or ``"domain"`` (everything).
    """

    __test__ = False  # keep pytest from collecting this class

    kind: str
    params: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(Fraction(v) for v in self.params))
        if self.kind == "ystrip":
            (c,) = self.params
            if c < 1:
                raise RegionOutsideDomain(f"strip y >= {c} leaves the fundamental domain")
        elif self.kind == "box":
            x0, x1, y0, y1 = self.params
            if not (-HALF <= x0 < x1 <= HALF and 0 < y0 < y1):
                raise RegionOutsideDomain(f"bad box {self.params}")
            closest = 0 if x0 <= 0 <= x1 else min(x0 * x0, x1 * x1)
            if closest + y0 * y0 < 1:
                raise RegionOutsideDomain(f"box {self.params} dips below the unit circle")
        elif self.kind == "domain":
            if self.params:
                raise ValueError("the whole-domain indicator takes no parameters")
        else:
            raise ValueError(f"unknown test function kind {self.kind!r}")

    @classmethod
    def ystrip(cls, c) -> TestFunction:
        return cls("ystrip", (c,))

    @classmethod
    def box(cls, x0, x1, y0, y1) -> TestFunction:
        return cls("box", (x0, x1, y0, y1))

    @classmethod
    def domain(cls) -> TestFunction:
        return cls("domain")

    def __call__(self, z: HPoint) -> bool:
        """Closed-region membership of a reduced point."""
        if self.kind == "ystrip":
            return z.y >= self.params[0]
        if self.kind == "box":
            x0, x1, y0, y1 = self.params
            return x0 <= z.x <= x1 and y0 <= z.y <= y1
        return True

    def on_boundary(self, z: HPoint) -> bool:
        """Whether ``z`` lies exactly on an edge of the region (always False for the domain)."""
        if self.kind == "ystrip":
            return z.y == self.params[0]
        if self.kind == "box":
            x0, x1, y0, y1 = self.params
            return self(z) and (z.x in (x0, x1) or z.y in (y0, y1))
        return False

    def spec(self) -> str:
        if self.kind == "domain":
            return "domain"
        return f"{self.kind}:" + ",".join(str(v) for v in self.params)

    def _bounds(self) -> tuple[float, float, Callable[[float], float], float]:
        """x-range, lower y-boundary and upper y-bound for quadrature."""
        arc = lambda x: math.sqrt(1.0 - x * x)
        if self.kind == "ystrip":
            c = float(self.params[0])
            return -0.5, 0.5, (lambda x: c), math.inf
        if self.kind == "box":
            x0, x1, y0, y1 = map(float, self.params)
            return x0, x1, (lambda x: y0), y1
        return -0.5, 0.5, arc, math.inf


def quadrature_measure(f: TestFunction, tol: float = 1e-10) -> float:
    """mu(region) by adaptive quadrature; the inner y-integral is done in closed form."""
    x0, x1, lower, upper = f._bounds()
    inv_upper = 0.0 if upper == math.inf else 1.0 / upper
    value, _ = integrate.quad(lambda x: 1.0 / lower(x) - inv_upper, x0, x1, epsabs=tol, epsrel=tol)
    return DENSITY * value


def measure_of(f: TestFunction) -> float:
    """Mass of the region under the probability measure (3/pi) dx dy / y^2."""
    if f.kind == "ystrip":
        return DENSITY * float(1 / f.params[0])
    if f.kind == "box":
        x0, x1, y0, y1 = f.params
        return DENSITY * float((x1 - x0) * (1 / y0 - 1 / y1))
    return quadrature_measure(f)
