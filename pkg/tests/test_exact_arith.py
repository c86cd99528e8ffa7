#!/usr/bin/env python3
"""
测试精确算术层：Q(i) 标量、多项式 gcd 与有理函数
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from core.arith_core import (
    RatFun,
    make_scalar,
    mp_arith,
    mp_gcd,
    poly_ring,
    rf_eval,
    rf_normalize,
    rf_root,
    scalar_abs2,
    scalar_ops,
    scalar_root,
    scalar_str,
    total_degree,
)
from core.errors import ArityMismatch, DivisionByZero, PoleAtPoint, UndefinedGcd
from tests.strategies import polys, ratfuns, scalars

I = make_scalar(0, 1)
ONE = make_scalar(1)


def ring1():
    ring = poly_ring(1)
    return ring, ring.gens[0]


def ring2():
    ring = poly_ring(2)
    return ring, ring.gens[0], ring.gens[1]


def test_scalar_conjugate_product():
    """(1+i)(1-i) = 2"""
    assert scalar_ops(ONE + I, ONE - I, 'mul') == make_scalar(2)


def test_scalar_rationalize():
    """1/(1+i) = (1-i)/2"""
    half = Fraction(1, 2)
    assert scalar_ops(ONE, ONE + I, 'div') == make_scalar(half, -half)


def test_scalar_fraction_sum():
    assert scalar_ops(make_scalar(Fraction(2, 3)), make_scalar(Fraction(1, 6)), 'add') == make_scalar(Fraction(5, 6))


def test_scalar_division_by_zero():
    with pytest.raises(DivisionByZero):
        scalar_ops(ONE, make_scalar(0), 'div')


def test_scalar_unknown_kind():
    with pytest.raises(ValueError):
        scalar_ops(ONE, ONE, 'pow')


def test_scalar_str_forms():
    assert scalar_str(make_scalar(3)) == "3"
    assert scalar_str(I) == "i"
    assert scalar_str(-I) == "-i"
    assert scalar_str(make_scalar(1, -2)) == "1-2*i"
    assert scalar_str(make_scalar(Fraction(1, 2), Fraction(3, 4))) == "1/2+3/4*i"


def test_scalar_abs2():
    assert scalar_abs2(make_scalar(3, 4)) == 25


@settings(max_examples=50, deadline=None)
@given(scalars(), scalars(), scalars())
def test_scalar_field_axioms(a, b, c):
    """加法结合律与分配律"""
    assert scalar_ops(scalar_ops(a, b, 'add'), c, 'add') == scalar_ops(a, scalar_ops(b, c, 'add'), 'add')
    lhs = scalar_ops(a, scalar_ops(b, c, 'add'), 'mul')
    rhs = scalar_ops(scalar_ops(a, b, 'mul'), scalar_ops(a, c, 'mul'), 'add')
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(scalars(nonzero=True))
def test_scalar_inverse(a):
    assert scalar_ops(a, scalar_ops(ONE, a, 'div'), 'mul') == ONE


def test_scalar_root():
    assert scalar_root(make_scalar(4), 2) == make_scalar(2)
    assert scalar_root(make_scalar(-1), 2) == I
    assert scalar_root(make_scalar(2), 2) is None
    assert scalar_root(make_scalar(0, 2), 2) == ONE + I


def test_mp_arith_examples():
    ring, z1, z2 = ring2()
    assert mp_arith(z1 + z2, z1 + z2, 'mul') == z1**2 + 2*z1*z2 + z2**2
    _, z = ring1()
    assert mp_arith(z - 1, z + 1, 'mul') == z**2 - 1
    assert mp_arith(z1 * z2, ring.zero, 'add') == z1 * z2


def test_mp_arith_arity_mismatch():
    _, z = ring1()
    _, z1, _ = ring2()
    with pytest.raises(ArityMismatch):
        mp_arith(z, z1, 'add')


def test_mp_gcd_examples():
    _, z = ring1()
    assert mp_gcd(z**2 - 1, z**2 - 2*z + 1) == z - 1
    _, z1, z2 = ring2()
    assert mp_gcd(z1 * z2, z1**2) == z1
    assert mp_gcd(z + 1, z + 2) == 1


def test_mp_gcd_monic_scaling():
    """gcd 的 grlex 首项系数为 1"""
    _, z = ring1()
    g = mp_gcd((2*z + 2) * (z - I), 3*z + 3)
    assert g == z + 1


def test_mp_gcd_zero_zero():
    ring, _ = ring1()
    with pytest.raises(UndefinedGcd):
        mp_gcd(ring.zero, ring.zero)


@settings(max_examples=50, deadline=None)
@given(polys(nonzero=True), polys(nonzero=True), polys(nonzero=True, max_terms=2))
def test_mp_gcd_divides_and_scales(a, b, c):
    g = mp_gcd(a, b)
    assert not (a.rem(g))
    assert not (b.rem(g))
    assert mp_gcd(a * c, b * c) == mp_gcd(g * c, g * c)


def test_total_degree():
    ring, z1, z2 = ring2()
    assert total_degree(z1**2 * z2 + z2) == 3
    assert total_degree(ring.zero) == -1


def test_rf_normalize_cancels():
    ring, z = ring1()
    r = rf_normalize(z**2 - 1, z - 1)
    assert r.num == z + 1
    assert r.den == ring.one


def test_rf_normalize_zero():
    ring, z = ring1()
    r = rf_normalize(ring.zero, z)
    assert r.is_zero()
    assert r.den == ring.one


def test_rf_normalize_constant_denominator():
    """2z/4 规范为 z/2，分母首项系数为 1"""
    ring, z = ring1()
    r = rf_normalize(2*z, ring(4))
    assert r.den == ring.one
    assert r.num == z.mul_ground(make_scalar(Fraction(1, 2)))


def test_rf_normalize_zero_denominator():
    ring, z = ring1()
    with pytest.raises(DivisionByZero):
        rf_normalize(z, ring.zero)


def test_rf_eval_examples():
    _, z = ring1()
    r = RatFun(z + 1, z - 1)
    assert rf_eval(r, [make_scalar(2)]) == make_scalar(3)
    assert rf_eval(r, [I]) == -I
    with pytest.raises(PoleAtPoint):
        rf_eval(r, [ONE])


def test_rf_eval_arity():
    _, z = ring1()
    with pytest.raises(ArityMismatch):
        rf_eval(RatFun(z), [ONE, ONE])


def test_ratfun_predicates():
    ring, z = ring1()
    assert RatFun.one(1).is_one()
    assert RatFun.from_scalar(5, 1).is_constant()
    assert RatFun.from_scalar(5, 1) == 5
    assert RatFun(z).is_polynomial()
    assert not RatFun(ring.one, z).is_polynomial()
    with pytest.raises(DivisionByZero):
        RatFun.zero(1).inverse()


def test_ratfun_mixed_operands():
    _, z = ring1()
    r = RatFun(z)
    assert (r + 1) - 1 == r
    assert (r * Fraction(1, 2)) * 2 == r
    assert 1 / (1 / r) == r
    assert r ** -2 == RatFun(z.ring.one, z**2)


@settings(max_examples=50, deadline=None)
@given(ratfuns(), ratfuns())
def test_ratfun_normal_form_idempotent(a, b):
    s = a + b
    again = rf_normalize(s.num, s.den)
    assert again == s
    assert (a - b) + b == a


@settings(max_examples=50, deadline=None)
@given(ratfuns(), ratfuns())
def test_rf_eval_is_homomorphism(a, b):
    """在非极点处 eval(a·b) = eval(a)·eval(b)"""
    point = [make_scalar(Fraction(7, 5), 1), make_scalar(-2, Fraction(1, 3))]
    try:
        va = rf_eval(a, point)
        vb = rf_eval(b, point)
    except PoleAtPoint:
        return
    assert rf_eval(a * b, point) == va * vb
    assert rf_eval(a + b, point) == va + vb


def test_rf_root():
    _, z = ring1()
    square = RatFun(4 * (z + 1)**2, z**2)
    root = rf_root(square, 2)
    assert root is not None
    assert root ** 2 == square
    assert rf_root(RatFun(z), 2) is None
    assert rf_root(RatFun.from_scalar(2, 1), 2) is None
