"""Equidistribution of Hecke spheres on X(1), checked numerically.

For a test region the multiplicity-weighted share of sphere points inside it
is compared with the region's mass under the normalised hyperbolic measure.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Sequence

from sympy import primerange

from .hecke import psi, sphere_tree
from .modsurface import HPoint, TestFunction, measure_of, reduced

RATE_NOTE = (
    "Finite-N averages; convergence is a limit statement with no rate given, "
    "so any tolerance applied to abs_error is an engineering choice."
)


@dataclass(frozen=True)
class EquidistRow:
    N: int
    size: int
    hits: int
    target: float
    boundary_hits: int = 0

    @property
    def empirical(self) -> Fraction:
        return Fraction(self.hits, self.size)

    @property
    def abs_error(self) -> float:
        return abs(float(self.empirical) - self.target)


@dataclass
class EquidistReport:
    center: HPoint
    test: TestFunction
    rows: list[EquidistRow] = field(default_factory=list)
    note: str = RATE_NOTE

    @property
    def max_error(self) -> float:
        return max(r.abs_error for r in self.rows)


def _sphere_row(z: HPoint, f: TestFunction, target: float, n: int) -> EquidistRow:
    sphere = sphere_tree(z, n)
    hits = boundary = 0
    for w, m in sphere.points.items():
        if f(w):
            hits += m
            if f.on_boundary(w):
                boundary += m
    return EquidistRow(n, sphere.total, hits, target, boundary)


def empirical_average(z: HPoint, n: int, f: TestFunction) -> Fraction:
    """Weighted fraction of the radius-``n`` sphere around ``z`` inside ``f``."""
    return _sphere_row(z, f, 0.0, n).empirical


def convergence_table(z: HPoint, n_list: Sequence[int], f: TestFunction, workers: int = 1) -> EquidistReport:
    """One row per radius; rows are independent, so ``workers > 1`` only changes speed."""
    if not n_list:
        raise ValueError("n_list must not be empty")
    target = measure_of(f)
    job = partial(_sphere_row, z, f, target)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, n_list))
    else:
        rows = [job(n) for n in n_list]
    for r in rows:
        assert r.size == psi(r.N)
    return EquidistReport(reduced(z), f, rows)


def parse_n_list(text: str) -> list[int]:
    """Radii from ``"2,3,5"``, ``"primes:MAX"``, ``"powers:P:MAX"`` or ``"range:LO:HI"``."""
    kind, _, rest = text.partition(":")
    if not rest:
        values = [int(v) for v in text.split(",") if v.strip()]
    elif kind == "primes":
        values = list(primerange(2, int(rest) + 1))
    elif kind == "powers":
        p, hi = (int(v) for v in rest.split(":"))
        values, q = [], 1
        while q <= hi:
            values.append(q)
            q *= p
    elif kind == "range":
        lo, hi = (int(v) for v in rest.split(":"))
        values = list(range(lo, hi + 1))
    else:
        raise ValueError(f"unknown N-list form {text!r}")
    if not values or min(values) < 1:
        raise ValueError(f"N-list {text!r} must give positive integers")
    return values
