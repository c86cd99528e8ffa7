"""
测试用的随机对象生成：hypothesis 策略与带种子的 random.Random 生成器
"""

import random
from fractions import Fraction

from hypothesis import strategies as st

from core.arith_core import MultiPoly, RatFun, make_scalar, poly_ring
from core.upoly_core import UPoly

small_ints = st.integers(min_value=-5, max_value=5)
small_dens = st.integers(min_value=1, max_value=4)


@st.composite
def scalars(draw, nonzero=False):
    re = Fraction(draw(small_ints), draw(small_dens))
    im = Fraction(draw(small_ints), draw(small_dens))
    if nonzero and re == 0 and im == 0:
        re = Fraction(1)
    return make_scalar(re, im)


@st.composite
def polys(draw, nvars=2, max_terms=3, max_deg=2, nonzero=False):
    ring = poly_ring(nvars)
    monom = st.tuples(*[st.integers(min_value=0, max_value=max_deg)] * nvars)
    terms = draw(st.lists(st.tuples(monom, scalars()), max_size=max_terms))
    p = ring.zero
    for m, c in terms:
        p += ring.from_dict({m: c}) if c else ring.zero
    if nonzero and not p:
        p = ring.one
    return p


@st.composite
def ratfuns(draw, nvars=2):
    num = draw(polys(nvars=nvars))
    den = draw(polys(nvars=nvars, max_terms=2, nonzero=True))
    return RatFun(num, den)


@st.composite
def upolys(draw, nvars=1, max_degree=3):
    coeffs = draw(st.lists(ratfuns(nvars=nvars), min_size=0, max_size=max_degree + 1))
    return UPoly(coeffs, nvars)


def random_scalar(rng: random.Random, bound: int = 4, complex_part: bool = True):
    re = Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
    im = Fraction(rng.randint(-bound, bound), rng.randint(1, 3)) if complex_part else Fraction(0)
    return make_scalar(re, im)


def random_nonzero_scalar(rng: random.Random, bound: int = 4):
    while True:
        c = random_scalar(rng, bound)
        if c:
            return c


def random_poly(rng: random.Random, nvars: int, max_deg: int = 3, max_terms: int = 3) -> MultiPoly:
    ring = poly_ring(nvars)
    p = ring.zero
    for _ in range(rng.randint(1, max_terms)):
        total = rng.randint(0, max_deg)
        monom = [0] * nvars
        for _ in range(total):
            monom[rng.randrange(nvars)] += 1
        p += ring.from_dict({tuple(monom): random_nonzero_scalar(rng)})
    return p


def random_nonzero_poly(rng: random.Random, nvars: int, max_deg: int = 3, max_terms: int = 3) -> MultiPoly:
    while True:
        p = random_poly(rng, nvars, max_deg, max_terms)
        if p:
            return p


def random_ratfun(rng: random.Random, nvars: int, max_deg: int = 3) -> RatFun:
    num = random_poly(rng, nvars, max_deg)
    den = random_nonzero_poly(rng, nvars, max(0, max_deg - 1), 2)
    return RatFun(num, den)


def random_nonzero_ratfun(rng: random.Random, nvars: int, max_deg: int = 3) -> RatFun:
    while True:
        r = random_ratfun(rng, nvars, max_deg)
        if not r.is_zero():
            return r
