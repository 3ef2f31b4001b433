"""The Bruhat-Tits tree of PGL(2, Q_p).

A vertex is the homothety class of the Z_p-lattice spanned by the columns
``(p^m, 0)`` and ``(u, 1)``.  Its normal form is ``(m, u mod p^m)`` with
``u`` in Z[1/p] and ``0 <= u < p^m``.  All arithmetic is exact on
:class:`fractions.Fraction`; no p-adic truncation is needed because the
shifts of vertices at finite distance from the root live in Z[1/p].
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from sympy import isprime

from .errors import MismatchedPrime, NotPrime
from .padic import INFINITY, rational_valuation


@dataclass(frozen=True, order=True)
class BTVertex:
    prime: int
    scale: int
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if not isprime(self.prime):
            raise NotPrime(f"{self.prime} is not a prime")
        shift = Fraction(self.shift)
        den = shift.denominator
        while den % self.prime == 0:
            den //= self.prime
        if den != 1:
            raise ValueError(f"shift {shift} is not in Z[1/{self.prime}]")
        object.__setattr__(self, "shift", shift % self.period)

    @property
    def period(self) -> Fraction:
        return Fraction(self.prime) ** self.scale

    @classmethod
    def root(cls, p: int) -> BTVertex:
        return cls(p, 0)

    def matrix(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Basis matrix ``(p^m  u; 0  1)``, columns spanning the lattice."""
        return (self.period, self.shift, Fraction(0), Fraction(1))

    def __str__(self) -> str:
        return f"{self.scale},{self.shift}"


def bt_neighbors(v: BTVertex) -> list[BTVertex]:
    """The p+1 classes of index-p sublattices.

    The first p go "down" (``m+1``, shifts ``u + k p^m``); the last one is
    ``(m-1, u)``, the class of ``<e1, p e2>``.
    """
    p, m, u = v.prime, v.scale, v.shift
    step = v.period
    out = [BTVertex(p, m + 1, u + k * step) for k in range(p)]
    out.append(BTVertex(p, m - 1, u))
    return out


def _change_of_basis(v: BTVertex, w: BTVertex):
    # g_v^{-1} g_w with g = (p^m u; 0 1) and g_v^{-1} = (p^-m  -u p^-m; 0 1)
    a, b, _, _ = v.matrix()
    c, d, _, _ = w.matrix()
    return (c / a, (d - b) / a, Fraction(0), Fraction(1))


def bt_distance(v: BTVertex, w: BTVertex) -> int:
    """Tree distance from the elementary divisors of ``g_v^{-1} g_w``.

    If ``p^a``, ``p^b`` (``a <= b``) are the elementary divisors, the
    distance is ``b - a = v(det) - 2 * min v(entry)``.
    """
    if v.prime != w.prime:
        raise MismatchedPrime(f"p={v.prime} vs p={w.prime}")
    p = v.prime
    entries = _change_of_basis(v, w)
    det = entries[0] * entries[3] - entries[1] * entries[2]
    low = min(rational_valuation(x, p) for x in entries)
    assert low != INFINITY
    return rational_valuation(det, p) - 2 * low


def flow_h_p(v: BTVertex, n: int) -> BTVertex:
    """Right action of ``diag(p, 1)**n`` on the normal-form representative.

    ``flow_h_p(flow_h_p(v, a), b) == flow_h_p(v, a + b)`` unless ``a < 0 < b``:
    backward steps forget digits of the shift, because diag(p, 1) does not
    normalise PGL(2, Z_p).
    """
    return BTVertex(v.prime, v.scale + n, v.shift)


def _non_backtracking(v: BTVertex, n: int) -> Iterator[BTVertex]:
    if n == 0:
        yield v
        return
    stack = [(w, v, 1) for w in reversed(bt_neighbors(v))]
    while stack:
        w, parent, depth = stack.pop()
        if depth == n:
            yield w
            continue
        for x in reversed(bt_neighbors(w)):
            if x != parent:
                stack.append((x, w, depth + 1))


def bt_sphere(v: BTVertex, n: int) -> list[BTVertex]:
    """All vertices at distance exactly ``n`` from ``v``."""
    if n < 0:
        raise ValueError("radius must be nonnegative")
    return list(_non_backtracking(v, n))


def bfs(v: BTVertex, radius: int) -> dict[BTVertex, tuple[int, BTVertex | None]]:
    """Breadth-first search to ``radius``: vertex -> (depth, parent).

    Raises ``RuntimeError`` if a vertex other than the parent is rediscovered,
    which would mean the graph has a cycle.
    """
    seen: dict[BTVertex, tuple[int, BTVertex | None]] = {v: (0, None)}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        depth, parent = seen[x]
        if depth == radius:
            continue
        for y in bt_neighbors(x):
            if y == parent:
                continue
            if y in seen:
                raise RuntimeError(f"cycle through {y}")
            seen[y] = (depth + 1, x)
            queue.append(y)
    return seen
