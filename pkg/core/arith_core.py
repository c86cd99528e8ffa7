"""
精确算术层：高斯有理数 Q(i)、多元多项式、多项式 gcd 和有理函数域 R^n

Scalar 直接使用 sympy 的 QQ_I 元素，MultiPoly 使用 sympy 稀疏多项式环
（分次字典序 grlex，z1 > z2 > ...）。gcd 由 sympy 的子结式 PRS 完成。
"""

import cmath
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing

from core.errors import ArityMismatch, DivisionByZero, PoleAtPoint, UndefinedGcd

logger = logging.getLogger(__name__)

Scalar = type(QQ_I.one)
MultiPoly = PolyElement

SCALAR_KINDS = ('add', 'sub', 'mul', 'div')
POLY_KINDS = ('add', 'sub', 'mul')


def _to_qq(value):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def make_scalar(re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0) -> Scalar:
    """由实部、虚部（整数或 Fraction）构造高斯有理数"""
    return QQ_I(_to_qq(re), _to_qq(im))


def to_scalar(value) -> Scalar:
    """int / Fraction / Scalar 统一转换为 Scalar"""
    if isinstance(value, Fraction):
        return QQ_I(_to_qq(value))
    return QQ_I.convert(value)


def qq_to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def scalar_ops(a: Scalar, b: Scalar, kind: str) -> Scalar:
    """
    Q(i) 上的四则运算

    参数:
    a, b (Scalar): 操作数
    kind (str): 'add' / 'sub' / 'mul' / 'div'

    返回:
    Scalar: 规范形式的结果
    """
    a = to_scalar(a)
    b = to_scalar(b)
    if kind == 'add':
        return a + b
    if kind == 'sub':
        return a - b
    if kind == 'mul':
        return a * b
    if kind == 'div':
        if not b:
            raise DivisionByZero(f"标量除以零: {scalar_str(a)} / 0")
        return a / b
    raise ValueError(f"未知的标量运算: {kind}")


def scalar_abs2(a: Scalar) -> Fraction:
    """|a|^2，精确有理数"""
    return qq_to_fraction(a.x) ** 2 + qq_to_fraction(a.y) ** 2


def scalar_to_complex(a: Scalar) -> complex:
    return complex(float(qq_to_fraction(a.x)), float(qq_to_fraction(a.y)))


def scalar_str(a: Scalar) -> str:
    """标量的文本形式，可被表达式解析器读回"""
    re, im = qq_to_fraction(a.x), qq_to_fraction(a.y)
    if im == 0:
        return str(re)
    im_part = "i" if im == 1 else ("-i" if im == -1 else f"{im}*i")
    if re == 0:
        return im_part
    if im_part.startswith("-"):
        return f"{re}{im_part}"
    return f"{re}+{im_part}"


@lru_cache(maxsize=None)
def _root_ring() -> PolyRing:
    return PolyRing(('u',), QQ_I, 'grlex')


def scalar_root(c: Scalar, m: int) -> Optional[Scalar]:
    """
    在 Q(i) 中求 c 的一个 m 次根

    多个根都在 Q(i) 中时取辐角绝对值最小的那个（优先正辐角）。

    返回:
    Optional[Scalar]: 根，不存在时返回 None
    """
    if m < 1:
        raise ValueError("m 必须为正整数")
    c = to_scalar(c)
    if m == 1 or not c:
        return c
    ring = _root_ring()
    u = ring.gens[0]
    _, factors = (u ** m - ring.ground_new(c)).factor_list()
    roots = []
    for fac, _ in factors:
        if fac.degree() == 1:
            lead = fac.coeff(u)
            tail = fac.coeff(1)
            roots.append(-tail / lead)
    if not roots:
        return None

    def phase_key(r):
        phase = cmath.phase(scalar_to_complex(r))
        return (round(abs(phase), 12), -phase)

    return min(roots, key=phase_key)


def var_names(nvars: int) -> Tuple[str, ...]:
    if nvars == 1:
        return ('z',)
    return tuple(f"z{k}" for k in range(1, nvars + 1))


@lru_cache(maxsize=None)
def poly_ring(nvars: int) -> PolyRing:
    """n 元多项式环 Q(i)[z1..zn]，单变量时变量名为 z"""
    if nvars < 1:
        raise ValueError("变量个数至少为 1")
    return PolyRing(var_names(nvars), QQ_I, 'grlex')


def _check_arity(a: PolyElement, b: PolyElement) -> None:
    if a.ring.ngens != b.ring.ngens or a.ring != b.ring:
        raise ArityMismatch(f"变量个数不一致: {a.ring.ngens} 与 {b.ring.ngens}")


def mp_arith(a: MultiPoly, b: MultiPoly, kind: str) -> MultiPoly:
    """多项式环运算，kind 为 'add' / 'sub' / 'mul'"""
    _check_arity(a, b)
    if kind == 'add':
        return a + b
    if kind == 'sub':
        return a - b
    if kind == 'mul':
        return a * b
    raise ValueError(f"未知的多项式运算: {kind}")


def grlex_monic(p: MultiPoly) -> MultiPoly:
    """缩放使 grlex 首项系数为 1（零多项式原样返回）"""
    if not p:
        return p
    lc = p.LC
    if lc == p.ring.domain.one:
        return p
    return p.quo_ground(lc)


def mp_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """
    多项式最大公因式，grlex 首项系数归一

    参数:
    a, b (MultiPoly): 不全为零的多项式

    返回:
    MultiPoly: 首一的 gcd
    """
    _check_arity(a, b)
    if not a and not b:
        raise UndefinedGcd("gcd(0, 0) 没有定义")
    return grlex_monic(a.gcd(b))


def poly_is_constant(p: MultiPoly) -> bool:
    return p.is_ground


def poly_constant(p: MultiPoly) -> Scalar:
    """常数多项式的值"""
    return p.coeff(1) if p else p.ring.domain.zero


def total_degree(p: MultiPoly) -> int:
    if not p:
        return -1
    return max(sum(monom) for monom in p.keys())


class RatFun:
    """
    有理函数 num/den，始终处于约化规范形式：
    gcd(num, den) = 1，den 的 grlex 首项系数为 1，零表示为 0/1。
    """

    __slots__ = ('num', 'den')

    def __init__(self, num: MultiPoly, den: Optional[MultiPoly] = None):
        if den is None:
            den = num.ring.one
        normalized = rf_normalize(num, den)
        self.num = normalized.num
        self.den = normalized.den

    @classmethod
    def _raw(cls, num: MultiPoly, den: MultiPoly) -> 'RatFun':
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def from_poly(cls, p: MultiPoly) -> 'RatFun':
        return cls._raw(p, p.ring.one)

    @classmethod
    def from_scalar(cls, c, nvars: int) -> 'RatFun':
        ring = poly_ring(nvars)
        return cls._raw(ring.ground_new(to_scalar(c)), ring.one)

    @classmethod
    def zero(cls, nvars: int) -> 'RatFun':
        ring = poly_ring(nvars)
        return cls._raw(ring.zero, ring.one)

    @classmethod
    def one(cls, nvars: int) -> 'RatFun':
        ring = poly_ring(nvars)
        return cls._raw(ring.one, ring.one)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def nvars(self) -> int:
        return self.num.ring.ngens

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == self.num.ring.one and self.den == self.den.ring.one

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def constant(self) -> Scalar:
        """常数有理函数的值"""
        if not self.is_constant():
            raise ValueError("不是常数")
        return poly_constant(self.num)

    def _coerce(self, other) -> 'RatFun':
        if isinstance(other, RatFun):
            _check_arity(self.num, other.num)
            return other
        if isinstance(other, PolyElement):
            _check_arity(self.num, other)
            return RatFun.from_poly(other)
        return RatFun.from_scalar(other, self.nvars)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __neg__(self) -> 'RatFun':
        return RatFun._raw(-self.num, self.den)

    def __add__(self, other) -> 'RatFun':
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        na, da, nb, db = self.num, self.den, other.num, other.den
        g, da_g, db_g = da.cofactors(db)
        if g.is_ground:
            return _rescale(na * db + nb * da, da * db)
        t = na * db_g + nb * da_g
        if not t:
            return RatFun.zero(self.nvars)
        g2, t_g2, _ = t.cofactors(g)
        return _rescale(t_g2, da_g * db.exquo(g2))

    __radd__ = __add__

    def __sub__(self, other) -> 'RatFun':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'RatFun':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'RatFun':
        other = self._coerce(other)
        if not self.num or not other.num:
            return RatFun.zero(self.nvars)
        na, da, nb, db = self.num, self.den, other.num, other.den
        _, na_g, db_g = na.cofactors(db)
        _, nb_g, da_g = nb.cofactors(da)
        return _rescale(na_g * nb_g, da_g * db_g)

    __rmul__ = __mul__

    def inverse(self) -> 'RatFun':
        if not self.num:
            raise DivisionByZero("有理函数 0 没有逆元")
        return _rescale(self.den, self.num)

    def __truediv__(self, other) -> 'RatFun':
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> 'RatFun':
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> 'RatFun':
        if k < 0:
            return self.inverse() ** (-k)
        # 约化分式的幂仍然约化
        return RatFun._raw(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Scalar)):
            return self.is_constant() and self.constant() == to_scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFun({self.num.as_expr()!s}, {self.den.as_expr()!s})"


def _rescale(num: MultiPoly, den: MultiPoly) -> RatFun:
    """已约化的 num/den 只需把分母缩放成首一"""
    if not num:
        return RatFun._raw(num.ring.zero, num.ring.one)
    lc = den.LC
    if lc != den.ring.domain.one:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return RatFun._raw(num, den)


def rf_normalize(num: MultiPoly, den: MultiPoly) -> RatFun:
    """
    约化并规范化有理函数

    参数:
    num, den (MultiPoly): 分子、分母，分母非零

    返回:
    RatFun: gcd(num, den)=1 且分母 grlex 首一
    """
    _check_arity(num, den)
    if not den:
        raise DivisionByZero("有理函数分母为零")
    if not num:
        return RatFun._raw(num.ring.zero, num.ring.one)
    _, num_r, den_r = num.cofactors(den)
    return _rescale(num_r, den_r)


def rf_eval(r: RatFun, point: Sequence[Scalar]) -> Scalar:
    """
    在 Q(i)^n 的点上精确求值

    返回:
    Scalar: r(point)，分母在该点为零时抛出 PoleAtPoint
    """
    if len(point) != r.nvars:
        raise ArityMismatch(f"求值点维数 {len(point)} 与变量个数 {r.nvars} 不一致")
    values = [to_scalar(v) for v in point]
    den_val = _poly_eval(r.den, values)
    if not den_val:
        raise PoleAtPoint(f"分母 {r.den.as_expr()} 在该点为零")
    return _poly_eval(r.num, values) / den_val


def _poly_eval(p: MultiPoly, values) -> Scalar:
    if not p:
        return QQ_I.zero
    result = p(*values)
    return QQ_I.convert(result)


def _poly_root(p: MultiPoly, m: int) -> Optional[Tuple[MultiPoly, Scalar]]:
    """p = c·A^m 时返回 (A, c)，A 首一"""
    if p.is_ground:
        return p.ring.one, poly_constant(p)
    _, factors = p.sqf_list()
    base = p.ring.one
    for fac, mult in factors:
        if mult % m:
            return None
        base = base * fac ** (mult // m)
    base = grlex_monic(base)
    rest = p.exquo(base ** m)
    if not rest.is_ground:
        return None
    return base, poly_constant(rest)


def rf_root(r: RatFun, m: int) -> Optional[RatFun]:
    """
    在 R^n 中求 r 的 m 次根

    返回:
    Optional[RatFun]: u 满足 u^m = r；不存在精确根时返回 None
    """
    if m < 1:
        raise ValueError("m 必须为正整数")
    if m == 1 or r.is_zero():
        return r
    num_root = _poly_root(r.num, m)
    if num_root is None:
        return None
    den_root = _poly_root(r.den, m)
    if den_root is None:
        return None
    (a, ca), (b, cb) = num_root, den_root
    scale = scalar_root(ca / cb, m)
    if scale is None:
        logger.debug(f"系数 {scalar_str(ca / cb)} 在 Q(i) 中没有 {m} 次根")
        return None
    return RatFun(a.mul_ground(scale), b)
