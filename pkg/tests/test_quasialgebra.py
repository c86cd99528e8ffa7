#!/usr/bin/env python3
"""
测试代数 R^n[f] 与 R^n[e^p, e^{-p}]：生成元分类、单位分解、稳定除法、
理想成员、等价判定与单位方程
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from core.algebra_core import (
    GENERIC_BASIS,
    ExpAffineGen,
    GenericGen,
    PolynomialGen,
    classify_generator,
    describe_generator,
    divide,
    element_str,
    equiv,
    exp_element,
    from_exp_basis,
    generic_element,
    has_nontrivial_invertibles,
    ideal_member,
    is_invertible,
    parse_element,
    solve_unit_equation,
    split_unit,
    stability_verdict,
    to_exp_basis,
)
from core.arith_core import RatFun, make_scalar, poly_ring
from core.errors import (
    BasisMismatch,
    DivisionByZero,
    NotAUnit,
    UnsupportedGenerator,
    ZeroElement,
    ZeroUnit,
)
from core.expr_core import parse_expr
from core.numeric_core import (
    check_division,
    check_solution_family,
    laurent_values,
    poly_values,
    relative_errors,
    sample_points,
)
from core.upoly_core import LaurentPoly, UPoly, up_xgcd
from tests.strategies import random_nonzero_ratfun, random_ratfun

ONE = RatFun.one(1)
ZERO = RatFun.zero(1)


def zfun(nvars=1, k=0):
    return RatFun(poly_ring(nvars).gens[k])


def gen_of(text):
    return classify_generator(parse_expr(text))


def elem(text, gen):
    return parse_element(parse_expr(text), gen)


def exp_z():
    return gen_of("exp(z)")


def test_classify_exp_affine():
    gen = gen_of("exp(z1*z2) + 1/z1")
    assert isinstance(gen, ExpAffineGen)
    z1, z2 = poly_ring(2).gens
    assert gen.q1 == RatFun.one(2)
    assert gen.p == z1 * z2
    assert gen.q2 == RatFun(z1.ring.one, z1)
    assert has_nontrivial_invertibles(gen)


def test_classify_generic():
    gen = gen_of("exp(z)+exp(2*z)")
    assert isinstance(gen, GenericGen)
    assert gen.declared_order == Fraction(1)
    assert not has_nontrivial_invertibles(gen)


def test_classify_polynomial():
    gen = gen_of("z^3")
    assert isinstance(gen, PolynomialGen)
    assert gen.q == zfun() ** 3


def test_classify_normalizes_products():
    """exp(a)·exp(b) 合并为 exp(a+b)，exp(a)^k 合并为 exp(ka)"""
    gen = gen_of("z*exp(z)*exp(z^2) + exp(z^2+z)^1 - 2")
    assert isinstance(gen, ExpAffineGen)
    z = poly_ring(1).gens[0]
    assert gen.p == z**2 + z
    assert gen.q1 == zfun() + 1
    assert gen.q2 == RatFun.from_scalar(-2, 1)

    gen = gen_of("exp(z)^3")
    assert gen.p == 3 * z


@pytest.mark.parametrize("text", [
    "exp(exp(z))",
    "exp(1/z)",
    "1/(exp(z)+1)",
    "exp(z)+exp(z+1)",
    "exp(1)",
])
def test_classify_rejects(text):
    with pytest.raises(UnsupportedGenerator):
        gen_of(text)


def test_exp_affine_requires_nonconstant_exponent():
    ring = poly_ring(1)
    with pytest.raises(NotAUnit):
        ExpAffineGen(q1=ONE, p=ring(3), q2=ZERO)


def test_describe_and_stability():
    gen = gen_of("2*exp(z^2)-z")
    assert describe_generator(gen) == {"kind": "exp_affine", "q1": "2", "p": "z^2", "q2": "-z"}
    verdict = stability_verdict(gen)
    assert verdict.has_nontrivial_invertibles
    assert verdict.stable_algebra == "R^n[e^p,e^-p]"
    assert stability_verdict(gen_of("exp(z)+exp(z^2)")).stable_algebra == "R^n[f]"
    assert stability_verdict(gen_of("z")).stable_algebra == "R^n"


def test_to_exp_basis_examples():
    gen = gen_of("2*exp(z)+1")
    f_sq = UPoly([ZERO, ZERO, ONE], 1)
    assert to_exp_basis(f_sq, gen) == LaurentPoly(0, [ONE, 4 * ONE, 4 * ONE], 1)

    gen = gen_of("z*exp(z)-1")
    f_plus_one = UPoly([ONE, ONE], 1)
    assert to_exp_basis(f_plus_one, gen) == LaurentPoly.monomial(zfun(), 1)


def test_to_exp_basis_is_homomorphism():
    gen = gen_of("z*exp(z^2)+1/(z+1)")
    rng = random.Random(5)
    for _ in range(20):
        a = UPoly([random_ratfun(rng, 1, 2) for _ in range(3)], 1)
        b = UPoly([random_ratfun(rng, 1, 2) for _ in range(2)], 1)
        assert to_exp_basis(a * b, gen) == to_exp_basis(a, gen) * to_exp_basis(b, gen)
        assert to_exp_basis(a + b, gen) == to_exp_basis(a, gen) + to_exp_basis(b, gen)
        assert from_exp_basis(to_exp_basis(a, gen), gen) == a


def test_parse_element_in_exp_basis():
    gen = exp_z()
    assert elem("exp(2*z) - 1", gen).rep == LaurentPoly(0, [-ONE, ZERO, ONE], 1)
    assert elem("f^2 - 1", gen) == elem("w^2-1", gen)


def test_parse_element_polynomial_generator_substitutes():
    gen = gen_of("z^2")
    e = elem("f + 1", gen)
    assert e.basis == GENERIC_BASIS
    assert e.rep == UPoly.constant(zfun() ** 2 + 1)


def test_split_unit_examples():
    z = zfun()
    assert split_unit(LaurentPoly(2, [ONE, ONE], 1)) == (2, UPoly([ONE, ONE], 1))
    assert split_unit(LaurentPoly.monomial(ONE, 1)) == (1, UPoly([ONE], 1))
    g = LaurentPoly(2, [1 / z, ZERO, ONE], 1)
    assert split_unit(g) == (2, UPoly([1 / z, ZERO, ONE], 1))
    with pytest.raises(ZeroElement):
        split_unit(LaurentPoly.zero(1))


def test_is_invertible_examples():
    gen = exp_z()
    assert is_invertible(elem("z*w^3", gen), gen) == (zfun(), 3)
    assert is_invertible(elem("w+1", gen), gen) is None
    assert is_invertible(elem("5", gen), gen) == (RatFun.from_scalar(5, 1), 0)
    with pytest.raises(ZeroElement):
        is_invertible(elem("0", gen), gen)

    generic = gen_of("exp(z)+exp(z^2)")
    assert is_invertible(elem("z", generic), generic) == (zfun(), 0)
    assert is_invertible(elem("f", generic), generic) is None


def test_divide_exp_basis_exact():
    """(e^{2z}-1)/(e^z-1) = e^z+1"""
    gen = exp_z()
    result = divide(elem("w^2-1", gen), elem("w-1", gen), gen)
    assert result.in_algebra
    assert result.quotient == elem("w+1", gen)
    assert element_str(result.quotient, gen) == "f+1"


def test_divide_sine_over_z():
    """sin z / z 在 R[e^{iz}, e^{-iz}] 中"""
    gen = gen_of("exp(i*z)")
    sin_z = elem("(1/(2*i))*w - (1/(2*i))/w", gen)
    result = divide(sin_z, elem("z", gen), gen)
    assert result.in_algebra

    c = RatFun.from_scalar(make_scalar(0, Fraction(-1, 2)), 1) / zfun()
    assert result.quotient.rep == LaurentPoly(-1, [-c, ZERO, c], 1)

    check = check_division(sin_z, elem("z", gen), result.quotient, gen, count=20, tol=1e-9)
    assert check.passed

    points = sample_points(1, 20, [c])
    z = points[:, 0]
    w = np.exp(poly_values(gen.p, points))
    values = laurent_values(result.quotient.rep, w, points)
    assert np.max(relative_errors(values, np.sin(z) / z)) <= 1e-9


def test_divide_generic_not_in_m0():
    gen = gen_of("exp(z)+exp(z^2)")
    result = divide(elem("f", gen), elem("f+1", gen), gen)
    assert result.verdict == 'not_in_m0'
    assert result.certificate == UPoly([ONE, ONE], 1)
    assert result.cofactor == UPoly([ZERO, ONE], 1)


def test_divide_generic_in_algebra():
    gen = gen_of("exp(z)+exp(z^2)")
    result = divide(elem("z*f^2 - z", gen), elem("2*z*f + 2*z", gen), gen)
    assert result.in_algebra
    assert result.quotient == elem("f/2 - 1/2", gen)
    check = check_division(elem("z*f^2 - z", gen), elem("2*z*f + 2*z", gen), result.quotient, gen)
    assert check.passed


def test_divide_exp_basis_not_in_m0():
    gen = exp_z()
    result = divide(elem("w", gen), elem("w+1", gen), gen)
    assert result.verdict == 'not_in_m0'
    assert result.certificate == UPoly([ONE, ONE], 1)


def test_divide_errors():
    gen = exp_z()
    with pytest.raises(DivisionByZero):
        divide(elem("w", gen), elem("0", gen), gen)
    generic = gen_of("exp(z)+exp(z^2)")
    with pytest.raises(BasisMismatch):
        divide(elem("w", gen), elem("f", generic), gen)


def test_divide_zero_dividend():
    gen = exp_z()
    result = divide(elem("0", gen), elem("w+1", gen), gen)
    assert result.in_algebra
    assert result.quotient.is_zero()


def _random_upoly(rng, nvars, degree):
    return UPoly([random_ratfun(rng, nvars, 2) for _ in range(degree)] + [random_nonzero_ratfun(rng, nvars, 2)], nvars)


def test_division_dichotomy_property():
    """随机除法查询：要么商精确回代，要么证书非常数且与余因子互素"""
    rng = random.Random(1234)
    outcomes = {'in_algebra': 0, 'not_in_m0': 0}
    for k in range(500):
        nvars = rng.randint(1, 2)
        h1_rep = _random_upoly(rng, nvars, rng.randint(0, 2))
        other = _random_upoly(rng, nvars, rng.randint(0, 2))
        h0_rep = h1_rep * other if rng.random() < 0.4 else other
        if k % 2:
            gen = GenericGen(label="f", declared_order=Fraction(1), nvars=nvars)
            h0, h1 = generic_element(h0_rep), generic_element(h1_rep)
        else:
            ring = poly_ring(nvars)
            gen = ExpAffineGen(q1=RatFun.one(nvars), p=ring.gens[0] ** 2, q2=RatFun.zero(nvars))
            h0 = exp_element(LaurentPoly.from_upoly(h0_rep, rng.randint(-2, 2)))
            h1 = exp_element(LaurentPoly.from_upoly(h1_rep, rng.randint(-2, 2)))
        result = divide(h0, h1, gen)
        outcomes[result.verdict] += 1
        if result.in_algebra:
            assert (result.quotient * h1).rep == h0.rep
        else:
            assert result.certificate.degree >= 1
            g, _, _ = up_xgcd(result.certificate, result.cofactor)
            assert g.degree == 0
    assert outcomes['in_algebra'] > 0 and outcomes['not_in_m0'] > 0


def test_ideal_member_exp_basis():
    gen = exp_z()
    g = elem("w*(w-1)", gen)
    witness = ideal_member(elem("w-1", gen), g, gen)
    assert witness is not None
    assert witness.rep == LaurentPoly.monomial(ONE, 0)
    assert ideal_member(elem("w+1", gen), g, gen) is None


def test_ideal_member_generic():
    gen = gen_of("exp(z)+exp(z^2)")
    witness = ideal_member(elem("z*f", gen), elem("f", gen), gen)
    assert witness == elem("z", gen)
    assert ideal_member(elem("f+1", gen), elem("f", gen), gen) is None
    with pytest.raises(ZeroElement):
        ideal_member(elem("f", gen), elem("0", gen), gen)


def test_ideal_member_agrees_with_divide():
    """e^p 基底下随机实例：ideal_member 有见证当且仅当 divide 给出 in_algebra"""
    rng = random.Random(4321)
    outcomes = {True: 0, False: 0}
    for _ in range(300):
        nvars = rng.randint(1, 2)
        ring = poly_ring(nvars)
        gen = ExpAffineGen(q1=RatFun.one(nvars), p=ring.gens[-1] ** 2 + ring.gens[0], q2=RatFun.zero(nvars))
        g_rep = _random_upoly(rng, nvars, rng.randint(0, 2))
        other = _random_upoly(rng, nvars, rng.randint(0, 2))
        h_rep = g_rep * other if rng.random() < 0.5 else other
        g = exp_element(LaurentPoly.from_upoly(g_rep, rng.randint(-3, 3)))
        h = exp_element(LaurentPoly.from_upoly(h_rep, rng.randint(-3, 3)))

        witness = ideal_member(h, g, gen)
        result = divide(h, g, gen)
        assert (witness is not None) == result.in_algebra
        outcomes[result.in_algebra] += 1
        if witness is not None:
            _, q = split_unit(g.rep)
            assert witness.rep * LaurentPoly.from_upoly(q) == h.rep
            assert (result.quotient * g).rep == h.rep
    assert outcomes[True] > 0 and outcomes[False] > 0


def test_equiv_exp_basis():
    gen = exp_z()
    assert equiv(elem("w-1", gen), elem("z*w^2*(w-1)", gen), gen) == (zfun(), 2)
    assert equiv(elem("w-1", gen), elem("w+1", gen), gen) is None


def test_equiv_generic():
    gen = gen_of("exp(z)+exp(z^2)")
    assert equiv(elem("f", gen), elem("z*f", gen), gen) == (zfun(), 0)
    with pytest.raises(ZeroElement):
        equiv(elem("f", gen), elem("0", gen), gen)


def test_equiv_is_an_equivalence():
    gen = exp_z()
    a = elem("w^2 + z*w - 1", gen)
    b = elem("(z+1)*w^3*(w^2 + z*w - 1)", gen)
    c = elem("(w^2 + z*w - 1)/(z*w)", gen)
    r_ab, m_ab = equiv(a, b, gen)
    r_bc, m_bc = equiv(b, c, gen)
    r_ac, m_ac = equiv(a, c, gen)
    assert equiv(a, a, gen) == (ONE, 0)
    assert r_ab * r_bc == r_ac
    assert m_ab + m_bc == m_ac
    r_ba, m_ba = equiv(b, a, gen)
    assert r_ba == 1 / r_ab and m_ba == -m_ab


def test_solve_square_family():
    z = poly_ring(1).gens[0]
    P = UPoly([ONE, 2 * ONE, ONE], 1)
    family = solve_unit_equation(P, ONE, z)
    assert family is not None
    assert (family.m, family.q, family.unit_part, family.u) == (2, ONE, ONE, ONE)
    assert family.formula() == "ε*exp((z)/2)-1"
    check = check_solution_family(P, ONE, family, count=20, tol=1e-9)
    assert check.passed


def test_solve_no_solution():
    z = poly_ring(1).gens[0]
    assert solve_unit_equation(UPoly([ONE, ZERO, ONE], 1), ONE, z) is None


def test_solve_linear():
    z = poly_ring(1).gens[0]
    family = solve_unit_equation(UPoly([ZERO, zfun()], 1), zfun(), z**2)
    assert (family.m, family.q, family.u) == (1, ZERO, ONE)
    assert family.formula() == "exp(z^2)"


def test_solve_deferred_root():
    """z 在 R^1 中没有平方根，保留为延迟根，数值上取主值"""
    z = poly_ring(1).gens[0]
    P = UPoly([ONE, 2 * ONE, ONE], 1)
    family = solve_unit_equation(P, zfun(), z)
    assert family.deferred_root
    assert family.as_dict()["u"] is None
    assert check_solution_family(P, zfun(), family).passed


def test_solve_errors():
    z = poly_ring(1).gens[0]
    P = UPoly([ONE, ONE], 1)
    with pytest.raises(ZeroUnit):
        solve_unit_equation(P, ZERO, z)
    with pytest.raises(NotAUnit):
        solve_unit_equation(P, ONE, z.ring(2))
