from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hecketrees.errors import DivisionByZero, MismatchedPrime, PrecisionExhausted, ZeroInput
from hecketrees.padic import (
    INFINITY,
    PAdicValue,
    Place,
    abs_at_place,
    add,
    from_rational,
    inv,
    mul,
    product_formula_check,
    rational_valuation,
)

PRIMES = st.sampled_from([2, 3, 5, 7])
nonzero_rationals = st.builds(Fraction, st.integers(-10**6, 10**6).filter(bool), st.integers(1, 10**6))


def trial_factor(n):
    """Prime factors of |n| by trial division; oracle independent of sympy."""
    n, out, d = abs(n), set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def brute_inverse(a, m):
    return next(u for u in range(m) if a * u % m == 1)


def test_from_rational_integer():
    v = from_rational(12, 2, 4)
    assert (v.valuation, v.unit_digits, v.precision) == (2, 3, 4)


def test_from_rational_one_third():
    v = from_rational(Fraction(1, 3), 2, 4)
    assert v.valuation == 0
    assert v.unit_digits == brute_inverse(3, 16) == 11


def test_from_rational_zero():
    v = from_rational(0, 5, 3)
    assert v.valuation == INFINITY and v.is_zero


def test_mul_identity():
    v = mul(from_rational(2, 2, 4), from_rational(Fraction(1, 2), 2, 4))
    assert (v.valuation, v.unit_digits) == (0, 1)


def test_add_with_carry():
    four = PAdicValue(2, 2, 1, 4)
    v = add(four, four)
    assert (v.valuation, v.unit_digits) == (3, 1)
    # one leading digit cancelled, so one fewer known digit
    assert v.precision == 3


def test_inv_of_three():
    v = inv(from_rational(3, 2, 4))
    assert (v.valuation, v.unit_digits) == (0, brute_inverse(3, 16))


def test_errors():
    with pytest.raises(MismatchedPrime):
        add(from_rational(1, 2), from_rational(1, 3))
    with pytest.raises(DivisionByZero):
        inv(from_rational(0, 2))
    one = from_rational(1, 2, 8)
    with pytest.raises(PrecisionExhausted):
        add(one, -one)


def test_exact_zero_is_additive_identity():
    z = PAdicValue.zero(3, 5)
    x = from_rational(Fraction(7, 9), 3, 5)
    assert add(z, x) == x and add(x, z) == x
    assert mul(z, x).is_zero


@pytest.mark.parametrize("r, place, expected", [
    (6, Place(2), Fraction(1, 2)),
    (6, Place.infinity(), Fraction(6)),
    (Fraction(-9, 4), Place(3), Fraction(1, 9)),
])
def test_abs_at_place(r, place, expected):
    assert abs_at_place(r, place) == expected


@pytest.mark.parametrize("r", [6, 1, Fraction(-360, 77)])
def test_product_formula_examples(r):
    assert product_formula_check(r) == 1


def test_product_formula_zero():
    with pytest.raises(ZeroInput):
        product_formula_check(0)


@settings(deadline=None)
@given(nonzero_rationals)
def test_product_formula_against_trial_division(r):
    primes = trial_factor(r.numerator) | trial_factor(r.denominator)
    prod = abs(r)
    for p in primes:
        prod *= abs_at_place(r, Place(p))
    assert prod == 1 == product_formula_check(r)


@given(nonzero_rationals, nonzero_rationals, PRIMES)
def test_abs_multiplicative(x, y, p):
    assert abs_at_place(x * y, Place(p)) == abs_at_place(x, Place(p)) * abs_at_place(y, Place(p))


@given(nonzero_rationals, nonzero_rationals, PRIMES)
def test_ultrametric(x, y, p):
    assume(x + y != 0)
    vx, vy, vs = (rational_valuation(r, p) for r in (x, y, x + y))
    assert vs >= min(vx, vy)
    if vx != vy:
        assert vs == min(vx, vy)


@given(nonzero_rationals, nonzero_rationals, PRIMES)
def test_operations_agree_with_exact_rationals(x, y, p):
    k = 12
    a, b = from_rational(x, p, k), from_rational(y, p, k)
    assert mul(a, b).agrees_with(from_rational(x * y, p, k))
    assert inv(a).agrees_with(from_rational(1 / x, p, k))
    if x + y != 0:
        try:
            s = add(a, b)
        except PrecisionExhausted:
            # cancellation beyond the known digits
            assert rational_valuation(x + y, p) >= min(a.absolute_precision, b.absolute_precision)
        else:
            assert s.agrees_with(from_rational(x + y, p, k))


@settings(max_examples=200)
@given(st.integers(1, 10**9), PRIMES)
def test_unit_inversion(n, p):
    assume(n % p)
    u = from_rational(n, p)
    w = mul(u, inv(u))
    assert (w.valuation, w.unit_digits, w.precision) == (0, 1, u.precision)


def test_digits_and_residue():
    v = from_rational(-1, 3, 4)
    assert v.digits() == [2, 2, 2, 2]
    assert v.residue(2) == 8
    assert from_rational(Fraction(1, 2), 3).norm() == 1
    assert from_rational(Fraction(1, 9), 3).norm() == 9
