"""Hecke neighbours, trees, spheres and the Hecke correspondence T_N on X(1).

Two independent routes compute the sphere of radius N around a point:

* :func:`sphere_tree` walks the rooted (p+1)-regular trees prime by prime,
  never stepping back along the edge it arrived on;
* :func:`sphere_coset` applies the upper-triangular representatives
  ``(a b; 0 d)``, ``ad = N``, ``gcd(a, b, d) = 1`` directly.

Both return multisets keyed by the reduced point; they must agree exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Iterator, Mapping, Sequence

from sympy import divisors, factorint, isprime

from .errors import InvalidWord, NotPrime
from .modsurface import HPoint, IntMatrix2, Triple, apply_triple, reduce_triple


def psi(n: int) -> int:
    """Dedekind psi: ``n * prod(1 + 1/p)``, the size of the radius-n sphere."""
    return prod((p + 1) * p ** (e - 1) for p, e in factorint(n).items())


def _check_prime(p: int) -> None:
    if not isprime(p):
        raise NotPrime(f"{p} is not a prime")


def _neighbor_triples(t: Triple, p: int) -> list[Triple]:
    out = [apply_triple((p, 0, 0, 1), t)]
    out.extend(apply_triple((1, k, 0, p), t) for k in range(p))
    return out


def neighbors(z: HPoint, p: int) -> list[HPoint]:
    """The p+1 Hecke neighbours ``p*z, z/p, (z+1)/p, ..., (z+p-1)/p``, unreduced.

    The order is fixed; it is the child labelling of the tree at ``p``.
    """
    _check_prime(p)
    return [HPoint.from_triple(t) for t in _neighbor_triples(z.to_triple(), p)]


@lru_cache(maxsize=1 << 15)
def reduced_neighbor_triples(t: Triple, p: int) -> tuple[Triple, ...]:
    return tuple(reduce_triple(*n) for n in _neighbor_triples(t, p))


def reduced_neighbors(z: HPoint, p: int) -> Counter[HPoint]:
    """Neighbours of ``z`` in X(1) with multiplicity."""
    _check_prime(p)
    t = reduce_triple(*z.to_triple())
    return Counter(HPoint.from_triple(n) for n in reduced_neighbor_triples(t, p))


# Tree addresses

@dataclass(frozen=True)
class TreeAddress:
    """A point of the restricted product of the rooted trees, one word per prime.

    Letter ``j`` of the word at ``p`` picks the j-th formula neighbour of
    the current point (see :func:`neighbors`).  Primes that are absent sit
    at the root.
    """

    words: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        words = tuple(sorted((p, tuple(w)) for p, w in self.words if len(w)))
        for p, w in words:
            _check_prime(p)
            if any(not 0 <= letter <= p for letter in w):
                raise InvalidWord(f"letters at p={p} must lie in 0..{p}: {w}")
        object.__setattr__(self, "words", words)

    @classmethod
    def from_dict(cls, words: Mapping[int, Sequence[int] | str]) -> TreeAddress:
        return cls(tuple((p, tuple(int(c) for c in w)) for p, w in words.items()))

    def word(self, p: int) -> tuple[int, ...]:
        return dict(self.words).get(p, ())

    def distance(self, p: int) -> int:
        return len(self.word(p))

    @property
    def radius(self) -> int:
        """The integer N with ``distance(p) == v_p(N)`` for all p."""
        return prod(p ** len(w) for p, w in self.words)


def _backtrack_index(nbrs: Sequence[Triple], prev: Triple | None) -> int | None:
    # First neighbour equal to the previous vertex. If several coincide in
    # X(1) any one may be dropped: the multiset below is the same.
    if prev is None:
        return None
    return nbrs.index(prev)


def walk(z: HPoint, addr: TreeAddress, order: Sequence[int] | None = None) -> HPoint:
    """Endpoint of ``addr`` under the tree map centred at ``z``.

    Primes are processed in increasing order unless ``order`` is given.
    """
    t = reduce_triple(*z.to_triple())
    for p in _prime_order(dict(addr.words), order):
        prev = None
        for letter in addr.word(p):
            nbrs = reduced_neighbor_triples(t, p)
            if letter == _backtrack_index(nbrs, prev):
                raise InvalidWord(f"letter {letter} at p={p} steps back")
            prev, t = t, nbrs[letter]
    return HPoint.from_triple(t)


def _prime_order(exps: Mapping[int, object], order: Sequence[int] | None) -> list[int]:
    if order is None:
        return sorted(exps)
    order = list(order)
    missing = set(exps) - set(order)
    if missing:
        raise ValueError(f"order does not cover primes {sorted(missing)}")
    return [p for p in order if p in exps]


def iter_sphere_addresses(z: HPoint, n: int, order: Sequence[int] | None = None) -> Iterator[tuple[TreeAddress, HPoint]]:
    """Every address on the sphere of radius ``n`` with its endpoint.

    This is the literal enumeration: one item per address, no merging.
    Use :func:`sphere_tree` for anything but small ``n``.
    """
    exps = factorint(n)
    primes = _prime_order(exps, order)

    def rec(i: int, t: Triple, done: tuple):
        if i == len(primes):
            yield TreeAddress(done), HPoint.from_triple(t)
            return
        p = primes[i]

        def along(t: Triple, prev: Triple | None, word: tuple, left: int):
            if left == 0:
                yield from rec(i + 1, t, done + ((p, word),))
                return
            nbrs = reduced_neighbor_triples(t, p)
            back = _backtrack_index(nbrs, prev)
            for j, nt in enumerate(nbrs):
                if j != back:
                    yield from along(nt, t, word + (j,), left - 1)

        yield from along(t, None, (), exps[p])

    yield from rec(0, reduce_triple(*z.to_triple()), ())


@lru_cache(maxsize=1 << 12)
def _prime_power_sphere(center: Triple, p: int, nu: int) -> tuple[tuple[Triple, int], ...]:
    # States are (vertex, vertex we came from); merging equal states is
    # exact because the subtree below an edge depends only on the classes
    # of its two ends.
    states: Counter = Counter({(center, None): 1})
    for _ in range(nu):
        nxt: Counter = Counter()
        for (t, prev), c in states.items():
            nbrs = reduced_neighbor_triples(t, p)
            back = _backtrack_index(nbrs, prev)
            for j, nt in enumerate(nbrs):
                if j != back:
                    nxt[nt, t] += c
        states = nxt
    out: Counter = Counter()
    for (t, _), c in states.items():
        out[t] += c
    return tuple(out.items())


@dataclass(frozen=True, eq=False)
class HeckeSphere:
    """Multiset of reduced points at Hecke distance ``radius`` from ``center``."""

    radius: int
    center: HPoint
    counts: Mapping[Triple, int] = field(repr=False)

    @cached_property
    def points(self) -> dict[HPoint, int]:
        return {HPoint.from_triple(t): m for t, m in sorted(self.counts.items(), key=_triple_key)}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeckeSphere):
            return NotImplemented
        return self.radius == other.radius and self.center == other.center and dict(self.counts) == dict(other.counts)

    def __hash__(self):
        return hash((self.radius, self.center, frozenset(self.counts.items())))

    def items(self) -> list[tuple[HPoint, int]]:
        return list(self.points.items())


def _triple_key(item) -> tuple:
    (X, Y, D), _ = item
    return (Fraction(X, D), Fraction(Y, D))


def sphere_counts(z: HPoint, n: int, order: Sequence[int] | None = None) -> Counter[Triple]:
    if n < 1:
        raise ValueError("radius must be a positive integer")
    exps = factorint(n)
    current: Counter = Counter({reduce_triple(*z.to_triple()): 1})
    for p in _prime_order(exps, order):
        nxt: Counter = Counter()
        for t, c in current.items():
            for w, m in _prime_power_sphere(t, p, exps[p]):
                nxt[w] += c * m
        current = nxt
    return current


def sphere_tree(z: HPoint, n: int, order: Sequence[int] | None = None) -> HeckeSphere:
    """T_n(z) computed through the trees, one prime at a time."""
    counts = sphere_counts(z, n, order)
    return HeckeSphere(n, _reduced(z), counts)


def _reduced(z: HPoint) -> HPoint:
    return HPoint.from_triple(reduce_triple(*z.to_triple()))


def coset_representatives(n: int, primitive: bool = True) -> list[IntMatrix2]:
    """Matrices ``(a b; 0 d)`` with ``ad = n`` and ``0 <= b < d``.

    With ``primitive`` (the sphere semantics) only ``gcd(a, b, d) == 1`` is
    kept, giving psi(n) matrices; without it all sigma_1(n) index-n
    sublattices are listed.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    reps = []
    for a in sorted(divisors(n), reverse=True):
        d = n // a
        g = gcd(a, d)
        reps.extend(IntMatrix2(a, b, 0, d) for b in range(d) if not primitive or gcd(g, b) == 1)
    return reps


def sphere_coset(z: HPoint, n: int, primitive: bool = True) -> HeckeSphere:
    """T_n(z) from the coset representatives, independent of the trees."""
    t = reduce_triple(*z.to_triple())
    counts: Counter = Counter()
    for m in coset_representatives(n, primitive):
        counts[reduce_triple(*apply_triple(m.as_tuple(), t))] += 1
    return HeckeSphere(n, _reduced(z), counts)


def order_invariance_check(z: HPoint, n: int, order: Sequence[int]) -> bool:
    """Whether processing the primes of ``n`` in ``order`` changes the sphere."""
    return sphere_counts(z, n) == sphere_counts(z, n, order)


def combine(spheres: Iterable[tuple[HeckeSphere, int]]) -> Counter[Triple]:
    """Weighted multiset union of several spheres."""
    out: Counter = Counter()
    for s, weight in spheres:
        for t, m in s.counts.items():
            out[t] += weight * m
    return out
