"""
单变量多项式环 R^n[w] 与 Laurent 扩张 R^n[w, 1/w]

系数都是 RatFun。提供带余除法、扩展欧几里得、完全幂检测、
根的模界以及 Tschirnhaus 变换。
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from core.arith_core import RatFun, scalar_abs2
from core.errors import ArityMismatch, DivisionByZero, InvalidInput, UndefinedGcd

logger = logging.getLogger(__name__)

LAURENT_KINDS = ('add', 'sub', 'mul')


def _trim(coeffs: Iterable[RatFun]) -> Tuple[RatFun, ...]:
    items = list(coeffs)
    while items and items[-1].is_zero():
        items.pop()
    return tuple(items)


class UPoly:
    """R^n 系数的单变量多项式，coeffs[k] 是 w^k 的系数；零多项式为空元组"""

    __slots__ = ('coeffs', 'nvars')

    def __init__(self, coeffs: Iterable[RatFun], nvars: int):
        self.coeffs = _trim(coeffs)
        self.nvars = nvars

    @classmethod
    def zero(cls, nvars: int) -> 'UPoly':
        return cls((), nvars)

    @classmethod
    def constant(cls, r: RatFun) -> 'UPoly':
        return cls((r,), r.nvars)

    @classmethod
    def monomial(cls, r: RatFun, k: int) -> 'UPoly':
        return cls([RatFun.zero(r.nvars)] * k + [r], r.nvars)

    @classmethod
    def gen(cls, nvars: int) -> 'UPoly':
        """多项式 w"""
        return cls((RatFun.zero(nvars), RatFun.one(nvars)), nvars)

    @classmethod
    def from_scalars(cls, values: Iterable, nvars: int = 1) -> 'UPoly':
        """由低次到高次的标量系数构造"""
        return cls([RatFun.from_scalar(v, nvars) for v in values], nvars)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> RatFun:
        if not self.coeffs:
            raise ValueError("零多项式没有首项系数")
        return self.coeffs[-1]

    def coeff(self, k: int) -> RatFun:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return RatFun.zero(self.nvars)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1].is_one()

    def _check(self, other: 'UPoly') -> None:
        if self.nvars != other.nvars:
            raise ArityMismatch(f"系数变量个数不一致: {self.nvars} 与 {other.nvars}")

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __neg__(self) -> 'UPoly':
        return UPoly([-c for c in self.coeffs], self.nvars)

    def __add__(self, other: 'UPoly') -> 'UPoly':
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly([self.coeff(k) + other.coeff(k) for k in range(n)], self.nvars)

    def __sub__(self, other: 'UPoly') -> 'UPoly':
        return self + (-other)

    def __mul__(self, other: 'UPoly') -> 'UPoly':
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return UPoly.zero(self.nvars)
        out = [RatFun.zero(self.nvars)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return UPoly(out, self.nvars)

    def __pow__(self, k: int) -> 'UPoly':
        if k < 0:
            raise ValueError("多项式不支持负幂")
        result = UPoly.constant(RatFun.one(self.nvars))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, r: RatFun) -> 'UPoly':
        return UPoly([c * r for c in self.coeffs], self.nvars)

    def monic(self) -> 'UPoly':
        return self.scale(self.lc.inverse())

    def __call__(self, x: RatFun) -> RatFun:
        """Horner 求值 P(x)"""
        acc = RatFun.zero(self.nvars)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_linear(self, a: RatFun, b: RatFun) -> 'UPoly':
        """P(a·w + b)"""
        inner = UPoly((b, a), self.nvars)
        acc = UPoly.zero(self.nvars)
        for c in reversed(self.coeffs):
            acc = acc * inner + UPoly.constant(c)
        return acc

    def shift(self, s: RatFun) -> 'UPoly':
        """P(w + s)"""
        return self.compose_linear(RatFun.one(self.nvars), s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.nvars, self.coeffs))

    def __repr__(self) -> str:
        return f"UPoly({list(self.coeffs)!r})"


def up_divmod(A: UPoly, B: UPoly) -> Tuple[UPoly, UPoly]:
    """
    带余除法 A = B·Q + R，deg R < deg B

    参数:
    A (UPoly): 被除式
    B (UPoly): 非零除式

    返回:
    Tuple[UPoly, UPoly]: (Q, R)
    """
    A._check(B)
    if B.is_zero():
        raise DivisionByZero("多项式除以零")
    nvars = A.nvars
    rem = list(A.coeffs)
    db = B.degree
    inv_lc = B.lc.inverse()
    quot = [RatFun.zero(nvars)] * max(len(rem) - db, 0)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if c.is_zero():
            continue
        t = c * inv_lc
        quot[k - db] = t
        for j, b in enumerate(B.coeffs):
            if not b.is_zero():
                rem[k - db + j] = rem[k - db + j] - t * b
    return UPoly(quot, nvars), UPoly(rem[:db], nvars)


def up_xgcd(A: UPoly, B: UPoly) -> Tuple[UPoly, UPoly, UPoly]:
    """
    扩展欧几里得算法

    返回:
    Tuple[UPoly, UPoly, UPoly]: (G, U, V)，G 首一且 U·A + V·B = G
    """
    A._check(B)
    if A.is_zero() and B.is_zero():
        raise UndefinedGcd("gcd(0, 0) 没有定义")
    nvars = A.nvars
    one = UPoly.constant(RatFun.one(nvars))
    zero = UPoly.zero(nvars)
    r0, r1 = A, B
    s0, s1 = one, zero
    t0, t1 = zero, one
    steps = 0
    while not r1.is_zero():
        q, r = up_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
        steps += 1
    inv = r0.lc.inverse()
    logger.debug(f"扩展欧几里得: {steps} 步, gcd 次数 {r0.degree}")
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


@dataclass(frozen=True)
class RootBound:
    """根模长所在的环形区域 lo <= |z| <= hi，附带精确的平方值"""

    lo: float
    hi: float
    lo_sq: Fraction
    hi_sq: Fraction

    def contains(self, modulus: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= modulus <= self.hi + slack


def root_bound(P: UPoly) -> RootBound:
    """
    首一常系数多项式所有根的模界

    ‖P‖ = max{1, |a_0|, ..., |a_{m-1}|}，lo = |a_0|/(m‖P‖)，hi = m‖P‖。
    """
    if P.degree < 1:
        raise InvalidInput("root_bound 需要次数至少为 1 的多项式")
    if not all(c.is_constant() for c in P.coeffs):
        raise InvalidInput("root_bound 需要常数系数")
    if not P.is_monic():
        raise InvalidInput("root_bound 需要首一多项式")
    m = P.degree
    abs2 = [scalar_abs2(c.constant()) for c in P.coeffs[:-1]]
    norm_sq = max([Fraction(1)] + abs2)
    lo_sq = abs2[0] / (m * m * norm_sq)
    hi_sq = m * m * norm_sq
    return RootBound(
        lo=math.sqrt(lo_sq),
        hi=math.sqrt(hi_sq),
        lo_sq=lo_sq,
        hi_sq=hi_sq,
    )


@dataclass(frozen=True)
class PerfectPowerCert:
    """c·(w+q)^m 的证书"""

    c: RatFun
    q: RatFun
    m: int

    def expand(self) -> UPoly:
        return binomial_power(self.c, self.q, self.m)


def binomial_power(c: RatFun, q: RatFun, m: int) -> UPoly:
    """按二项式展开 c·(w+q)^m"""
    coeffs: List[RatFun] = []
    qpow = RatFun.one(c.nvars)
    powers = [qpow]
    for _ in range(m):
        qpow = qpow * q
        powers.append(qpow)
    for k in range(m + 1):
        coeffs.append(c * math.comb(m, k) * powers[m - k])
    return UPoly(coeffs, c.nvars)


def perfect_power(P: UPoly) -> Optional[PerfectPowerCert]:
    """
    判断 P 是否为 c·(w+q)^m

    候选 q = P_{m-1}/(m·c) 是唯一可能的平移量，只需精确展开验证。
    """
    if P.degree < 1:
        raise InvalidInput("perfect_power 需要次数至少为 1 的多项式")
    m = P.degree
    c = P.lc
    q = P.coeff(m - 1) / (c * m)
    qpow = RatFun.one(P.nvars)
    # 从 w^{m-1} 往下逐项比较 c·C(m,k)·q^{m-k}
    for k in range(m - 1, -1, -1):
        qpow = qpow * q
        if c * math.comb(m, k) * qpow != P.coeff(k):
            return None
    return PerfectPowerCert(c=c, q=q, m=m)


def tschirnhaus(P: UPoly) -> Tuple[RatFun, UPoly]:
    """
    Tschirnhaus 变换，消去 w^{m-1} 项

    参数:
    P (UPoly): 首一多项式，次数 m >= 2

    返回:
    Tuple[RatFun, UPoly]: (shift, depressed)，shift = P_{m-1}/m，
    depressed(w) = P(w - shift)，即 depressed(w + shift) = P(w)
    """
    if not P.is_monic():
        raise InvalidInput("tschirnhaus 需要首一多项式")
    m = P.degree
    if m < 2:
        raise InvalidInput("tschirnhaus 需要次数至少为 2")
    pm1 = P.coeff(m - 1)
    shift = pm1 / m
    # R_k = sum_{j>=k} C(j,k) (-1)^{j-k} m^{k-j} P_j P_{m-1}^{j-k}
    pm1_pows = [RatFun.one(P.nvars)]
    for _ in range(m):
        pm1_pows.append(pm1_pows[-1] * pm1)
    depressed = []
    for k in range(m + 1):
        acc = RatFun.zero(P.nvars)
        for j in range(k, m + 1):
            pj = P.coeff(j)
            if pj.is_zero():
                continue
            scale = Fraction(math.comb(j, k) * (-1) ** (j - k), m ** (j - k))
            acc = acc + pj * pm1_pows[j - k] * scale
        depressed.append(acc)
    return shift, UPoly(depressed, P.nvars)


class LaurentPoly:
    """Σ_{k=lo}^{hi} coeffs[k-lo]·w^k，两端系数非零；零元素 lo=0 且 coeffs 为空"""

    __slots__ = ('lo', 'coeffs', 'nvars')

    def __init__(self, lo: int, coeffs: Iterable[RatFun], nvars: int):
        items = list(coeffs)
        start = 0
        while start < len(items) and items[start].is_zero():
            start += 1
        items = list(_trim(items[start:]))
        self.lo = lo + start if items else 0
        self.coeffs = tuple(items)
        self.nvars = nvars

    @classmethod
    def from_upoly(cls, p: UPoly, lo: int = 0) -> 'LaurentPoly':
        """w^lo · p"""
        return cls(lo, p.coeffs, p.nvars)

    @classmethod
    def monomial(cls, r: RatFun, k: int) -> 'LaurentPoly':
        return cls(k, (r,), r.nvars)

    @classmethod
    def zero(cls, nvars: int) -> 'LaurentPoly':
        return cls(0, (), nvars)

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def coeff(self, k: int) -> RatFun:
        idx = k - self.lo
        if 0 <= idx < len(self.coeffs):
            return self.coeffs[idx]
        return RatFun.zero(self.nvars)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def body(self) -> UPoly:
        """去掉 w^lo 因子后的多项式部分"""
        return UPoly(self.coeffs, self.nvars)

    def to_upoly(self) -> UPoly:
        if self.coeffs and self.lo < 0:
            raise ValueError("含负幂的 Laurent 多项式不能转为多项式")
        return UPoly([RatFun.zero(self.nvars)] * self.lo + list(self.coeffs), self.nvars)

    def shift(self, k: int) -> 'LaurentPoly':
        """乘以 w^k"""
        if not self.coeffs:
            return self
        return LaurentPoly(self.lo + k, self.coeffs, self.nvars)

    def scale(self, r: RatFun) -> 'LaurentPoly':
        return LaurentPoly(self.lo, [c * r for c in self.coeffs], self.nvars)

    def terms(self) -> List[Tuple[int, RatFun]]:
        return [(self.lo + i, c) for i, c in enumerate(self.coeffs) if not c.is_zero()]

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __neg__(self) -> 'LaurentPoly':
        return LaurentPoly(self.lo, [-c for c in self.coeffs], self.nvars)

    def __add__(self, other: 'LaurentPoly') -> 'LaurentPoly':
        return laurent_ops(self, other, 'add')

    def __sub__(self, other: 'LaurentPoly') -> 'LaurentPoly':
        return laurent_ops(self, other, 'sub')

    def __mul__(self, other: 'LaurentPoly') -> 'LaurentPoly':
        return laurent_ops(self, other, 'mul')

    def __pow__(self, k: int) -> 'LaurentPoly':
        if k < 0:
            if not self.is_monomial():
                raise ValueError("只有单项式可以取负幂")
            (e, c), = self.terms()
            return LaurentPoly.monomial(c ** k, e * k)
        result = LaurentPoly.monomial(RatFun.one(self.nvars), 0)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.nvars, self.lo, self.coeffs) == (other.nvars, other.lo, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.nvars, self.lo, self.coeffs))

    def __repr__(self) -> str:
        return f"LaurentPoly(lo={self.lo}, {list(self.coeffs)!r})"


def laurent_ops(a: LaurentPoly, b: LaurentPoly, kind: str) -> LaurentPoly:
    """
    Laurent 多项式环运算

    参数:
    a, b (LaurentPoly): 操作数
    kind (str): 'add' / 'sub' / 'mul'
    """
    if a.nvars != b.nvars:
        raise ArityMismatch(f"系数变量个数不一致: {a.nvars} 与 {b.nvars}")
    nvars = a.nvars
    if kind in ('add', 'sub'):
        if kind == 'sub':
            b = -b
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        lo = min(a.lo, b.lo)
        hi = max(a.hi, b.hi)
        return LaurentPoly(lo, [a.coeff(k) + b.coeff(k) for k in range(lo, hi + 1)], nvars)
    if kind == 'mul':
        if a.is_zero() or b.is_zero():
            return LaurentPoly.zero(nvars)
        prod = a.body() * b.body()
        return LaurentPoly(a.lo + b.lo, prod.coeffs, nvars)
    raise ValueError(f"未知的 Laurent 运算: {kind}")
