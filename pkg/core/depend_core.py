"""
代数相关性：用结式消去公共参数

两个函数 A(t)、B(t) 是同一参数 t 的有理函数（t = h 或 t = e^h）时，
Res_t(numA − x·denA, numB − y·denB) 给出非零多项式 P(x, y)，使 P(A, B) ≡ 0。
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple, Union

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyRing

from core.arith_core import MultiPoly, RatFun, Scalar, grlex_monic, total_degree
from core.errors import DegeneratePair, DegenerateResultant, InvalidInput
from core.expr_core import ast_to_ratfun, parse_expr, print_poly, print_ratfun

logger = logging.getLogger(__name__)

PARAM = 't'


@lru_cache(maxsize=None)
def elimination_ring() -> PolyRing:
    """Q(i)[t, x, y]，t 是要消去的参数"""
    return PolyRing((PARAM, 'x', 'y'), QQ_I, 'grlex')


@lru_cache(maxsize=None)
def _param_ring() -> PolyRing:
    return PolyRing((PARAM,), QQ_I, 'grlex')


def resultant(F: MultiPoly, G: MultiPoly, gen: int = 0) -> Union[MultiPoly, Scalar]:
    """
    F、G 关于第 gen 个变量的结式

    构造 Sylvester 矩阵，元素位于其余变量的多项式环中，
    用无分数（Bareiss）消元求行列式。

    参数:
    F, G (MultiPoly): 同一环中的非零多项式
    gen (int): 被消去变量的下标

    返回:
    MultiPoly: 其余变量的多项式（单变量环时为标量）
    """
    if not F or not G:
        raise InvalidInput("结式的两个多项式都必须非零")
    if F.ring != G.ring:
        raise InvalidInput("结式的两个多项式必须在同一个环中")
    m, n = F.degree(gen), G.degree(gen)
    if m == 0 and n == 0:
        raise DegenerateResultant("两个多项式关于消去变量都是常数")

    ring = F.ring
    sub = ring.drop(gen)
    domain = sub.to_domain() if isinstance(sub, PolyRing) else sub
    fc = [F.coeff_wrt(gen, k).drop(gen) for k in range(m, -1, -1)]
    gc = [G.coeff_wrt(gen, k).drop(gen) for k in range(n, -1, -1)]

    size = m + n
    rows = []
    for i in range(n):
        rows.append([domain.zero] * i + fc + [domain.zero] * (size - m - 1 - i))
    for j in range(m):
        rows.append([domain.zero] * j + gc + [domain.zero] * (size - n - 1 - j))
    det = DomainMatrix(rows, (size, size), domain).det()
    logger.debug(f"Sylvester 矩阵 {size}x{size}，结式总次数 {total_degree(det) if isinstance(sub, PolyRing) else 0}")
    return det


@dataclass(frozen=True)
class ParamPair:
    """同一参数 t 的两个有理函数"""

    A: RatFun
    B: RatFun

    def __post_init__(self):
        if self.A.nvars != 1 or self.B.nvars != 1:
            raise InvalidInput("参数化只能含一个参数 t")
        if self.A.is_constant() and self.B.is_constant():
            raise InvalidInput("A 与 B 不能都是常数")

    def as_dict(self) -> Dict[str, str]:
        return {"A": param_str(self.A), "B": param_str(self.B)}


def _to_param(p: MultiPoly) -> MultiPoly:
    ring = _param_ring()
    return ring.from_dict(dict(p.items())) if p else ring.zero


def param_str(r: RatFun) -> str:
    """以 t 为变量打印单参数有理函数"""
    return print_ratfun(RatFun._raw(_to_param(r.num), _to_param(r.den)))


def parse_param(text: str) -> RatFun:
    return ast_to_ratfun(parse_expr(text), 1, {PARAM: 0})


def parse_pair(a_text: str, b_text: str) -> ParamPair:
    return ParamPair(parse_param(a_text), parse_param(b_text))


def _lift(p: MultiPoly) -> MultiPoly:
    """把 t 的多项式放入 Q(i)[t, x, y]"""
    ring = elimination_ring()
    return ring.from_dict({(k, 0, 0): c for (k,), c in p.items()}) if p else ring.zero


@dataclass(frozen=True)
class Elimination:
    resultant: MultiPoly
    annihilator: MultiPoly
    reduced: bool

    @property
    def notes(self) -> Tuple[str, ...]:
        notes = ["消去多项式取结式的无平方部分，未验证不可约性"]
        if self.reduced:
            notes.append("结式不是无平方的，参数化可能不是单射")
        return tuple(notes)


def eliminate(pair: ParamPair) -> Elimination:
    """计算结式及其规范化的无平方部分"""
    R = elimination_ring()
    _, x, y = R.gens
    F = _lift(pair.A.num) - x * _lift(pair.A.den)
    G = _lift(pair.B.num) - y * _lift(pair.B.den)
    res = resultant(F, G, 0)
    if not res:
        raise DegeneratePair("结式恒为零，A 与 B 没有给出非平凡的消去多项式")
    res = grlex_monic(res)
    P = grlex_monic(res.sqf_part())
    reduced = P != res
    if reduced:
        logger.warning(f"结式不是无平方的，取无平方部分 {print_poly(P)}")
    logger.info(f"消去多项式: {print_poly(P)}")
    return Elimination(resultant=res, annihilator=P, reduced=reduced)


def annihilating_polynomial(pair: ParamPair) -> MultiPoly:
    """
    非零多项式 P(x, y)，满足 P(A(t), B(t)) ≡ 0

    结果是无平方的，按 grlex 首项系数归一；同一输入总得到同一结果。
    """
    return eliminate(pair).annihilator


def verify_dependence(P: MultiPoly, pair: ParamPair) -> bool:
    """代入 x -> A(t)、y -> B(t)，检查结果是否恒为零"""
    if not P:
        raise InvalidInput("P 不能为零")
    one = RatFun.one(1)
    powers_a = [one]
    powers_b = [one]
    total = RatFun.zero(1)
    for (i, j), c in P.items():
        while len(powers_a) <= i:
            powers_a.append(powers_a[-1] * pair.A)
        while len(powers_b) <= j:
            powers_b.append(powers_b[-1] * pair.B)
        total = total + powers_a[i] * powers_b[j] * RatFun.from_scalar(c, 1)
    return total.is_zero()


def bipoly_ring() -> PolyRing:
    """Q(i)[x, y]"""
    return elimination_ring().drop(PARAM)


def parse_bipoly(text: str) -> MultiPoly:
    ring = bipoly_ring()
    r = ast_to_ratfun(parse_expr(text), 2, {'x': 0, 'y': 1})
    if not r.is_polynomial():
        raise InvalidInput(f"'{text}' 不是 x, y 的多项式")
    p = r.num.quo_ground(r.den.coeff(1))
    return ring.from_dict(dict(p.items())) if p else ring.zero


