"""
代数 R^n[f] 与 R^n[e^p, e^{-p}]

生成元分类、单位分解、稳定除法、理想成员判定、等价判定以及单位方程 P(f) = R·e^p 的求解。
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from core.arith_core import MultiPoly, RatFun, rf_root, total_degree
from core.errors import (
    BasisMismatch,
    DivisionByZero,
    InvalidInput,
    NotAUnit,
    UnsupportedGenerator,
    VerificationFailed,
    ZeroElement,
    ZeroUnit,
)
from core.expr_core import (
    Expr,
    ast_to_expsum,
    ast_to_laurent,
    ast_to_upoly,
    max_var_index,
    print_expr,
    print_laurent,
    print_poly,
    print_ratfun,
    print_upoly,
)
from core.upoly_core import LaurentPoly, UPoly, perfect_power, up_divmod, up_xgcd

logger = logging.getLogger(__name__)

GENERIC_BASIS = 'generic'
EXP_BASIS = 'exp'


@dataclass(frozen=True)
class PolynomialGen:
    """f = q 本身是有理函数，代数退化为 R^n"""

    q: RatFun

    kind = 'polynomial'

    @property
    def nvars(self) -> int:
        return self.q.nvars

    @property
    def basis(self) -> str:
        return GENERIC_BASIS


@dataclass(frozen=True)
class ExpAffineGen:
    """f = q1·e^p + q2"""

    q1: RatFun
    p: MultiPoly
    q2: RatFun

    kind = 'exp_affine'

    def __post_init__(self):
        if self.q1.is_zero():
            raise InvalidInput("ExpAffine 生成元要求 q1 ≠ 0")
        if self.p.is_ground:
            raise NotAUnit("ExpAffine 生成元要求 p 不是常数")

    @property
    def nvars(self) -> int:
        return self.q1.nvars

    @property
    def basis(self) -> str:
        return EXP_BASIS


@dataclass(frozen=True)
class GenericGen:
    """声明为超越、有限阶的整函数 f（超越性由使用者断言）"""

    label: str
    declared_order: Fraction
    nvars: int

    kind = 'generic'

    @property
    def basis(self) -> str:
        return GENERIC_BASIS


GenDescriptor = Union[PolynomialGen, ExpAffineGen, GenericGen]


def describe_generator(gen: GenDescriptor) -> dict:
    """生成元的 JSON 友好描述"""
    if isinstance(gen, ExpAffineGen):
        return {
            "kind": gen.kind,
            "q1": print_ratfun(gen.q1),
            "p": print_poly(gen.p),
            "q2": print_ratfun(gen.q2),
        }
    if isinstance(gen, PolynomialGen):
        return {"kind": gen.kind, "q": print_ratfun(gen.q)}
    return {"kind": gen.kind, "label": gen.label, "declared_order": str(gen.declared_order)}


def classify_generator(expr: Expr, nvars: Optional[int] = None) -> GenDescriptor:
    """
    把生成元表达式分类

    参数:
    expr (Expr): 生成元表达式（变量、常数、四则运算、整数幂、exp(多项式)）
    nvars (int): 变量个数，默认取表达式中最大的 z 下标

    返回:
    GenDescriptor: PolynomialGen / ExpAffineGen / GenericGen
    """
    if nvars is None:
        nvars = max(1, max_var_index(expr))
    es = ast_to_expsum(expr, nvars)
    exponents = es.exponents()
    for p in exponents:
        if p.is_ground:
            raise UnsupportedGenerator(f"常数指数 exp({print_poly(p)}) 的系数不在 Q(i) 中")
    for i, a in enumerate(exponents):
        for b in exponents[i + 1:]:
            if (a - b).is_ground:
                raise UnsupportedGenerator(
                    f"指数 {print_poly(a)} 与 {print_poly(b)} 相差非零常数，系数不在 Q(i) 中")
    q2 = es.rational_part()
    if not exponents:
        if not q2.is_polynomial():
            logger.warning(f"生成元 {print_ratfun(q2)} 不是整函数")
        logger.debug(f"生成元分类: polynomial, q = {print_ratfun(q2)}")
        return PolynomialGen(q=q2)
    if len(exponents) == 1:
        p = exponents[0]
        gen = ExpAffineGen(q1=es.terms[p], p=p, q2=q2)
        logger.debug(f"生成元分类: exp_affine, p = {print_poly(p)}")
        return gen
    order = max(total_degree(p) for p in exponents)
    logger.debug(f"生成元分类: generic, {len(exponents)} 个不同指数, 阶 {order}")
    return GenericGen(label=print_expr(expr), declared_order=Fraction(order), nvars=nvars)


@dataclass(frozen=True)
class StabilityVerdict:
    kind: str
    stable_algebra: str
    has_nontrivial_invertibles: bool
    statement: str


def has_nontrivial_invertibles(gen: GenDescriptor) -> bool:
    """R^n[f] 是否含有 R·e^h（h 非常数）形式的可逆元"""
    return isinstance(gen, ExpAffineGen)


def stability_verdict(gen: GenDescriptor) -> StabilityVerdict:
    """
    二分结论：R^n[f] 在 M_0^n 中稳定，或 R^n[f] = R^n[e^p] 而 R^n[e^p, e^{-p}] 稳定
    """
    if isinstance(gen, PolynomialGen):
        return StabilityVerdict(
            kind=gen.kind,
            stable_algebra="R^n",
            has_nontrivial_invertibles=False,
            statement="f 是有理函数，R^n[f] = R^n，商总在 R^n 中",
        )
    if isinstance(gen, ExpAffineGen):
        return StabilityVerdict(
            kind=gen.kind,
            stable_algebra="R^n[e^p,e^-p]",
            has_nontrivial_invertibles=True,
            statement=f"R^n[f] = R^n[e^p]，p = {print_poly(gen.p)}；R^n[e^p,e^-p] 在 M_0^n 中稳定",
        )
    return StabilityVerdict(
        kind=gen.kind,
        stable_algebra="R^n[f]",
        has_nontrivial_invertibles=False,
        statement="R^n[f] 不含非平凡可逆元，在 M_0^n 中稳定",
    )


@dataclass(frozen=True)
class AlgebraElement:
    """generic 基底下 rep 是 f 的多项式，exp 基底下 rep 是 w = e^p 的 Laurent 多项式"""

    basis: str
    rep: Union[UPoly, LaurentPoly]

    @property
    def nvars(self) -> int:
        return self.rep.nvars

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def _check(self, other: 'AlgebraElement') -> None:
        if self.basis != other.basis:
            raise BasisMismatch(f"基底不一致: {self.basis} 与 {other.basis}")

    def __add__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check(other)
        return AlgebraElement(self.basis, self.rep + other.rep)

    def __sub__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check(other)
        return AlgebraElement(self.basis, self.rep - other.rep)

    def __mul__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check(other)
        return AlgebraElement(self.basis, self.rep * other.rep)


def generic_element(rep: UPoly) -> AlgebraElement:
    return AlgebraElement(GENERIC_BASIS, rep)


def exp_element(rep: LaurentPoly) -> AlgebraElement:
    return AlgebraElement(EXP_BASIS, rep)


def zero_element(gen: GenDescriptor) -> AlgebraElement:
    if gen.basis == EXP_BASIS:
        return exp_element(LaurentPoly.zero(gen.nvars))
    return generic_element(UPoly.zero(gen.nvars))


def parse_element(expr: Expr, gen: GenDescriptor) -> AlgebraElement:
    """
    在生成元 gen 下读入代数元素

    ExpAffine 时 f、w、exp(k·p) 都可出现；其它情况只允许 f。
    Polynomial 生成元下 f 直接代入 q。
    """
    if isinstance(gen, ExpAffineGen):
        return exp_element(ast_to_laurent(expr, gen.nvars, gen.q1, gen.p, gen.q2))
    rep = ast_to_upoly(expr, gen.nvars, 'f')
    if isinstance(gen, PolynomialGen):
        rep = UPoly.constant(rep(gen.q))
    return generic_element(rep)


def to_exp_basis(elem: UPoly, gen: ExpAffineGen) -> LaurentPoly:
    """代入 f = q1·w + q2"""
    return LaurentPoly.from_upoly(elem.compose_linear(gen.q1, gen.q2))


def from_exp_basis(lp: LaurentPoly, gen: ExpAffineGen) -> UPoly:
    """to_exp_basis 的逆：代入 w = (f - q2)/q1，要求不含负幂"""
    inv = gen.q1.inverse()
    return lp.to_upoly().compose_linear(inv, -gen.q2 * inv)


def element_str(elem: AlgebraElement, gen: Optional[GenDescriptor] = None) -> str:
    """元素的文本形式；ExpAffine 下无负幂时用 f 表示，否则用 w"""
    if elem.basis == GENERIC_BASIS:
        return print_upoly(elem.rep, 'f')
    if isinstance(gen, ExpAffineGen) and (elem.rep.is_zero() or elem.rep.lo >= 0):
        return print_upoly(from_exp_basis(elem.rep, gen), 'f')
    return print_laurent(elem.rep, 'w')


def split_unit(g: LaurentPoly) -> Tuple[int, UPoly]:
    """
    g = w^m·Q(w)，Q(0) ≠ 0

    返回:
    Tuple[int, UPoly]: (m, Q)
    """
    if g.is_zero():
        raise ZeroElement("split_unit 需要非零元素")
    return g.lo, g.body()


def is_invertible(g: AlgebraElement, gen: GenDescriptor) -> Optional[Tuple[RatFun, int]]:
    """
    判断 g 是否为 r·e^{mp}（generic 基底下只有 R^n 中的非零常数项）

    返回:
    Optional[Tuple[RatFun, int]]: (r, m)，不可逆时为 None
    """
    _check_basis(gen, g)
    if g.is_zero():
        raise ZeroElement("零元素不可逆")
    if g.basis == EXP_BASIS:
        if g.rep.is_monomial():
            return g.rep.coeffs[0], g.rep.lo
        return None
    if g.rep.degree == 0:
        return g.rep.coeffs[0], 0
    return None


def _check_basis(gen: GenDescriptor, *elems: AlgebraElement) -> None:
    for e in elems:
        if e.basis != gen.basis:
            raise BasisMismatch(f"元素基底 {e.basis} 与生成元 {gen.kind} 不一致")


@dataclass(frozen=True)
class DivisionResult:
    verdict: str  # 'in_algebra' | 'not_in_m0'
    quotient: Optional[AlgebraElement] = None
    certificate: Optional[UPoly] = None
    cofactor: Optional[UPoly] = None

    @property
    def in_algebra(self) -> bool:
        return self.verdict == 'in_algebra'


def _exact_quo(a: UPoly, b: UPoly) -> UPoly:
    q, r = up_divmod(a, b)
    if not r.is_zero():
        raise VerificationFailed("gcd 不整除输入")
    return q


def divide(h0: AlgebraElement, h1: AlgebraElement, gen: GenDescriptor) -> DivisionResult:
    """
    稳定除法 h0 / h1

    商属于代数时返回 in_algebra，否则返回 not_in_m0 以及除式中不能约去的因子作为证书
    （它与被除式余因子互素，说明 h0/h1 不在 M_0^n 中）。
    """
    h0._check(h1)
    _check_basis(gen, h0, h1)
    if h1.is_zero():
        raise DivisionByZero("除以零元素")
    if h0.is_zero():
        return DivisionResult('in_algebra', quotient=zero_element(gen))

    if h0.basis == GENERIC_BASIS:
        p0, p1 = h0.rep, h1.rep
        g, _, _ = up_xgcd(p0, p1)
        q0 = _exact_quo(p0, g)
        q1 = _exact_quo(p1, g)
        if q1.degree == 0:
            quotient = generic_element(q0.scale(q1.lc.inverse()))
            result = DivisionResult('in_algebra', quotient=quotient)
        else:
            result = DivisionResult('not_in_m0', certificate=q1.monic(), cofactor=q0)
    else:
        m0, q0 = split_unit(h0.rep)
        m1, q1 = split_unit(h1.rep)
        quo, rem = up_divmod(q0, q1)
        if rem.is_zero():
            quotient = exp_element(LaurentPoly.from_upoly(quo, m0 - m1))
            result = DivisionResult('in_algebra', quotient=quotient)
        else:
            g, _, _ = up_xgcd(q0, q1)
            result = DivisionResult('not_in_m0', certificate=_exact_quo(q1, g).monic(),
                                    cofactor=_exact_quo(q0, g))

    if result.in_algebra and (result.quotient * h1).rep != h0.rep:
        raise VerificationFailed("商乘以除式不等于被除式")
    logger.debug(f"除法结论: {result.verdict}")
    return result


def ideal_member(h: AlgebraElement, g: AlgebraElement, gen: GenDescriptor) -> Optional[AlgebraElement]:
    """
    判定 h ∈ M_0^n·g ∩ 代数

    exp 基底下 g = w^m·Q(w)，当 Q 整除 h 的多项式部分时返回余因子 C（h = C·Q）；
    generic 基底下当 g 整除 h 时返回 C（h = C·g）。
    """
    h._check(g)
    _check_basis(gen, h, g)
    if g.is_zero():
        raise ZeroElement("理想生成元为零")
    if h.basis == EXP_BASIS:
        _, q = split_unit(g.rep)
        if h.is_zero():
            return exp_element(LaurentPoly.zero(h.nvars))
        quo, rem = up_divmod(h.rep.body(), q)
        if not rem.is_zero():
            return None
        return exp_element(LaurentPoly.from_upoly(quo, h.rep.lo))
    quo, rem = up_divmod(h.rep, g.rep)
    if not rem.is_zero():
        return None
    return generic_element(quo)


def _scalar_multiple(a: UPoly, b: UPoly) -> Optional[RatFun]:
    """若 b = R·a（R ∈ R^n）返回 R"""
    if a.degree != b.degree:
        return None
    ratio = b.lc / a.lc
    if a.scale(ratio) != b:
        return None
    return ratio


def equiv(g1: AlgebraElement, g2: AlgebraElement, gen: GenDescriptor) -> Optional[Tuple[RatFun, int]]:
    """
    判定 g2 = R·e^{mp}·g1（generic 基底下 m = 0）

    返回:
    Optional[Tuple[RatFun, int]]: (R, m)，不等价时为 None
    """
    g1._check(g2)
    _check_basis(gen, g1, g2)
    if g1.is_zero() or g2.is_zero():
        raise ZeroElement("equiv 需要非零元素")
    if g1.basis == EXP_BASIS:
        m1, q1 = split_unit(g1.rep)
        m2, q2 = split_unit(g2.rep)
        ratio = _scalar_multiple(q1, q2)
        if ratio is None:
            return None
        return ratio, m2 - m1
    ratio = _scalar_multiple(g1.rep, g2.rep)
    if ratio is None:
        return None
    return ratio, 0


@dataclass(frozen=True)
class SolutionFamily:
    """
    解族 f = ε·u·e^{p/m} - q，ε^m = 1，u^m = unit_part

    u 为 None 表示 unit_part 在 R^n 中没有精确 m 次根，数值实例化时取主值根。
    """

    m: int
    q: RatFun
    unit_part: RatFun
    u: Optional[RatFun]
    p: MultiPoly
    c: RatFun

    @property
    def deferred_root(self) -> bool:
        return self.u is None

    def formula(self) -> str:
        power = print_poly(self.p)
        arg = power if self.m == 1 else f"({power})/{self.m}"
        head = "ε*" if self.m > 1 else ""
        if self.u is None:
            head += f"({print_ratfun(self.unit_part)})^(1/{self.m})*"
        elif not self.u.is_one():
            head += f"({print_ratfun(self.u)})*"
        text = f"{head}exp({arg})"
        if self.q.is_zero():
            return text
        shift = print_ratfun(-self.q)
        return text + (shift if shift.startswith('-') else '+' + shift)

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "q": print_ratfun(self.q),
            "unit_part": print_ratfun(self.unit_part),
            "u": None if self.u is None else print_ratfun(self.u),
            "p": print_poly(self.p),
            "deferred_root": self.deferred_root,
            "formula": self.formula(),
        }


def solve_unit_equation(P: UPoly, R: RatFun, p: MultiPoly) -> Optional[SolutionFamily]:
    """
    求解 P(f) = R·e^p

    P 是完全幂 c·(w+q)^m 时返回解族，否则返回 None（此时不存在有限阶整函数解）。
    """
    if R.is_zero():
        raise ZeroUnit("单位方程右端 R 为零")
    if p.is_ground:
        raise NotAUnit("p 为常数，R·e^p 不是非平凡可逆元")
    if P.degree < 1:
        raise InvalidInput("P 的次数至少为 1")
    cert = perfect_power(P)
    if cert is None:
        logger.info("P 不是完全幂，单位方程无解")
        return None
    unit_part = R / cert.c
    u = rf_root(unit_part, cert.m)
    if u is None:
        logger.info(f"{print_ratfun(unit_part)} 在 R^n 中没有精确 {cert.m} 次根，保留为延迟根")
    return SolutionFamily(m=cert.m, q=cert.q, unit_part=unit_part, u=u, p=p, c=cert.c)

