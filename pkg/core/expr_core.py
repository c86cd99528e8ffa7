"""
表达式语法、解析器、打印器以及 AST 到代数对象的转换

语法（递归下降）:
  expr   := term (('+'|'-') term)*
  term   := factor (('*'|'/') factor)*
  factor := '-' factor | base ('^' int)?
  base   := int | 'i' | var | 'exp' '(' expr ')' | '(' expr ')'
  var    := 'z' | 'z'[1-9][0-9]* | 't' | 'f' | 'w' | 'x' | 'y'
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from sympy.polys.domains import QQ_I

from core.arith_core import (
    MultiPoly,
    RatFun,
    Scalar,
    poly_constant,
    poly_ring,
    qq_to_fraction,
    scalar_ops,
    scalar_str,
)
from core.errors import DivisionByZero, InvalidInput, ParseError, UnsupportedGenerator
from core.upoly_core import LaurentPoly, UPoly

logger = logging.getLogger(__name__)

RESERVED = ('t', 'f', 'w', 'x', 'y')
_VAR_RE = re.compile(r'^z([1-9][0-9]*)?$')


class Expr:
    """表达式树节点基类"""

    def children(self) -> Tuple['Expr', ...]:
        return ()


@dataclass(frozen=True)
class Const(Expr):
    value: Scalar


@dataclass(frozen=True)
class Var(Expr):
    name: str

    @property
    def index(self) -> Optional[int]:
        """z / zK 的下标（z 即 z1），保留符号返回 None"""
        if self.name == 'z':
            return 1
        if self.name.startswith('z'):
            return int(self.name[1:])
        return None


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


def walk(node: Expr) -> Iterable[Expr]:
    yield node
    for child in node.children():
        yield from walk(child)


def var_names_in(node: Expr) -> List[str]:
    return sorted({n.name for n in walk(node) if isinstance(n, Var)})


def max_var_index(*nodes: Expr) -> int:
    """表达式中 z 变量的最大下标，没有 z 变量时为 0"""
    best = 0
    for node in nodes:
        for n in walk(node):
            if isinstance(n, Var) and n.index is not None:
                best = max(best, n.index)
    return best


def has_exp(node: Expr) -> bool:
    return any(isinstance(n, Exp) for n in walk(node))


# 常量折叠的构造函数

def _fold_binary(cls, left: Expr, right: Expr, kind: str) -> Expr:
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(scalar_ops(left.value, right.value, kind))
    return cls(left, right)


def make_neg(arg: Expr) -> Expr:
    if isinstance(arg, Const):
        return Const(-arg.value)
    return Neg(arg)


def make_pow(base: Expr, k: int) -> Expr:
    if isinstance(base, Const):
        return Const(base.value ** k)
    return Pow(base, k)


def make_exp(arg: Expr) -> Expr:
    if isinstance(arg, Const) and not arg.value:
        return Const(QQ_I.one)
    return Exp(arg)


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'name' | 'op' | 'end'
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == '\n':
            line += 1
            col = 1
            pos += 1
            continue
        if ch.isspace():
            col += 1
            pos += 1
            continue
        if ch.isdigit():
            end = pos
            while end < len(text) and text[end].isdigit():
                end += 1
            tokens.append(Token('int', text[pos:end], line, col))
            col += end - pos
            pos = end
            continue
        if ch.isalpha():
            end = pos
            while end < len(text) and (text[end].isalnum() or text[end] == '_'):
                end += 1
            tokens.append(Token('name', text[pos:end], line, col))
            col += end - pos
            pos = end
            continue
        if ch in '+-*/^()':
            tokens.append(Token('op', ch, line, col))
            col += 1
            pos += 1
            continue
        raise ParseError(f"无法识别的字符 {ch!r}", line, col, text)
    tokens.append(Token('end', '', line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column, self.text)

    def accept(self, text: str) -> bool:
        if self.tok.kind == 'op' and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or '输入结束'
            self.error(f"期望 '{text}'，实际为 '{found}'")

    def parse(self) -> Expr:
        if self.tok.kind == 'end':
            self.error("空表达式")
        node = self.expr()
        if self.tok.kind != 'end':
            self.error(f"多余的输入 '{self.tok.text}'")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept('+'):
                node = _fold_binary(Add, node, self.term(), 'add')
            elif self.accept('-'):
                node = _fold_binary(Sub, node, self.term(), 'sub')
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            if self.accept('*'):
                node = _fold_binary(Mul, node, self.factor(), 'mul')
            elif self.tok.kind == 'op' and self.tok.text == '/':
                slash = self.tok
                self.pos += 1
                right = self.factor()
                if isinstance(right, Const) and not right.value:
                    self.error("除数为零", slash)
                node = _fold_binary(Div, node, right, 'div')
            else:
                return node

    def factor(self) -> Expr:
        if self.accept('-'):
            return make_neg(self.factor())
        node = self.base()
        if self.accept('^'):
            tok = self.tok
            if tok.kind != 'int':
                self.error("指数必须是非负整数")
            self.pos += 1
            node = make_pow(node, int(tok.text))
        return node

    def base(self) -> Expr:
        tok = self.tok
        if tok.kind == 'int':
            self.pos += 1
            return Const(QQ_I(int(tok.text)))
        if tok.kind == 'name':
            self.pos += 1
            name = tok.text
            if name == 'i':
                return Const(QQ_I(0, 1))
            if name == 'exp':
                self.expect('(')
                arg = self.expr()
                self.expect(')')
                return make_exp(arg)
            if _VAR_RE.match(name) or name in RESERVED:
                return Var(name)
            self.error(f"未知的标识符 '{name}'", tok)
        if self.accept('('):
            node = self.expr()
            self.expect(')')
            return node
        found = tok.text or '输入结束'
        self.error(f"意外的 '{found}'")


def parse_expr(text: str) -> Expr:
    """
    解析表达式文本

    参数:
    text (str): 表达式

    返回:
    Expr: 常量已折叠的表达式树
    """
    return _Parser(text).parse()


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_SYMBOL = {Add: '+', Sub: '-', Mul: '*', Div: '/'}
_ATOM = 5


def _const_is_atom(value: Scalar) -> bool:
    if value == QQ_I(0, 1):
        return True
    return not value.y and qq_to_fraction(value.x).denominator == 1 and value.x >= 0


def _prec(node: Expr) -> int:
    if isinstance(node, Const):
        return _ATOM if _const_is_atom(node.value) else 0
    return _PREC.get(type(node), _ATOM)


def print_expr(node: Expr) -> str:
    """打印表达式，满足 parse_expr(print_expr(e)) == e"""
    if isinstance(node, Const):
        return scalar_str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Exp):
        return f"exp({print_expr(node.arg)})"
    if isinstance(node, Neg):
        return '-' + _wrap(node.arg, _PREC[Neg])
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _ATOM)}^{node.exp}"
    prec = _PREC[type(node)]
    left = _wrap(node.left, prec)
    right = _wrap(node.right, prec + 1)
    return f"{left}{_SYMBOL[type(node)]}{right}"


def _wrap(node: Expr, min_prec: int) -> str:
    text = print_expr(node)
    if _prec(node) < min_prec:
        return f"({text})"
    return text


def _coeff_str(c: Scalar) -> str:
    """单项式前的系数，复数或分数加括号"""
    text = scalar_str(c)
    if c.x and c.y:
        return f"({text})"
    return text


def _monom_str(monom: Tuple[int, ...], names: Tuple[str, ...]) -> str:
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _join_terms(terms: List[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith('-') else '+' + t
    return out


def print_poly(p: MultiPoly) -> str:
    """grlex 降序打印多项式，例如 x^3-y^2"""
    names = tuple(str(s) for s in p.ring.symbols)
    terms = []
    for monom, c in p.terms():
        mono = _monom_str(monom, names)
        if not mono:
            terms.append(scalar_str(c))
        elif c == QQ_I.one:
            terms.append(mono)
        elif c == -QQ_I.one:
            terms.append('-' + mono)
        else:
            terms.append(f"{_coeff_str(c)}*{mono}")
    return _join_terms(terms)


def _is_simple_den(p: MultiPoly) -> bool:
    if len(p) != 1:
        return False
    (monom, c), = p.terms()
    return c == QQ_I.one and sum(1 for e in monom if e) == 1


def print_ratfun(r: RatFun) -> str:
    num = print_poly(r.num)
    if r.den == r.den.ring.one:
        return num
    if len(r.num) > 1 or (r.num.is_ground and r.num.LC.x and r.num.LC.y):
        num = f"({num})"
    den = print_poly(r.den)
    if not _is_simple_den(r.den):
        den = f"({den})"
    return f"{num}/{den}"


def _is_simple_coeff(c: RatFun) -> bool:
    if not c.is_polynomial() or len(c.num) != 1:
        return False
    lc = c.num.LC
    return not (c.num.is_ground and lc.x and lc.y)


def _power_term(c: RatFun, var: str, k: int) -> str:
    """c·var^k，k 为负时写成 c/var^|k|"""
    if k == 0:
        return print_ratfun(c)
    power = var if abs(k) == 1 else f"{var}^{abs(k)}"
    if k < 0:
        if c.is_one():
            return f"1/{power}"
        if (-c).is_one():
            return f"-1/{power}"
        text = print_ratfun(c)
        if not _is_simple_coeff(c):
            text = f"({text})"
        return f"{text}/{power}"
    if c.is_one():
        return power
    if (-c).is_one():
        return '-' + power
    text = print_ratfun(c)
    if not _is_simple_coeff(c):
        text = f"({text})"
    return f"{text}*{power}"


def print_upoly(p: UPoly, var: str = 'w') -> str:
    terms = [_power_term(c, var, k) for k, c in reversed(list(enumerate(p.coeffs))) if not c.is_zero()]
    return _join_terms(terms)


def print_laurent(lp: LaurentPoly, var: str = 'w') -> str:
    terms = [_power_term(c, var, k) for k, c in reversed(lp.terms())]
    return _join_terms(terms)


def _z_var_map(nvars: int) -> Dict[str, int]:
    mapping = {'z': 0}
    for k in range(1, nvars + 1):
        mapping[f"z{k}"] = k - 1
    return mapping


def ast_to_ratfun(node: Expr, nvars: int, var_map: Optional[Dict[str, int]] = None) -> RatFun:
    """
    把不含 exp 和保留符号的表达式转换为有理函数

    参数:
    node (Expr): 表达式
    nvars (int): 多项式环的变量个数
    var_map (Dict[str, int]): 变量名到环变量下标的映射，默认 z/z1..zn
    """
    mapping = var_map if var_map is not None else _z_var_map(nvars)
    ring = poly_ring(nvars)

    def conv(n: Expr) -> RatFun:
        if isinstance(n, Const):
            return RatFun.from_scalar(n.value, nvars)
        if isinstance(n, Var):
            if n.name not in mapping:
                raise InvalidInput(f"有理函数中不允许出现变量 '{n.name}'")
            return RatFun.from_poly(ring.gens[mapping[n.name]])
        if isinstance(n, Add):
            return conv(n.left) + conv(n.right)
        if isinstance(n, Sub):
            return conv(n.left) - conv(n.right)
        if isinstance(n, Mul):
            return conv(n.left) * conv(n.right)
        if isinstance(n, Div):
            den = conv(n.right)
            if den.is_zero():
                raise DivisionByZero(f"除以零: {print_expr(n.right)}")
            return conv(n.left) / den
        if isinstance(n, Neg):
            return -conv(n.arg)
        if isinstance(n, Pow):
            return conv(n.base) ** n.exp
        if isinstance(n, Exp):
            raise UnsupportedGenerator("有理函数中不允许出现 exp")
        raise InvalidInput(f"未知节点 {n!r}")

    return conv(node)


def ast_to_poly(node: Expr, nvars: int, var_map: Optional[Dict[str, int]] = None) -> MultiPoly:
    """转换为多项式，分母非常数时报错"""
    r = ast_to_ratfun(node, nvars, var_map)
    if not r.is_polynomial():
        raise InvalidInput(f"'{print_expr(node)}' 不是多项式")
    return r.num.quo_ground(poly_constant(r.den))


def ast_to_upoly(node: Expr, nvars: int, var: str = 'f') -> UPoly:
    """
    把表达式读作 R^n[var] 中的多项式

    只允许除以不含 var 的表达式。
    """
    ring_map = _z_var_map(nvars)
    ring = poly_ring(nvars)

    def conv(n: Expr) -> UPoly:
        if isinstance(n, Const):
            return UPoly.constant(RatFun.from_scalar(n.value, nvars))
        if isinstance(n, Var):
            if n.name == var:
                return UPoly.gen(nvars)
            if n.name in ring_map:
                return UPoly.constant(RatFun.from_poly(ring.gens[ring_map[n.name]]))
            raise UnsupportedGenerator(f"此处不允许出现变量 '{n.name}'")
        if isinstance(n, Add):
            return conv(n.left) + conv(n.right)
        if isinstance(n, Sub):
            return conv(n.left) - conv(n.right)
        if isinstance(n, Mul):
            return conv(n.left) * conv(n.right)
        if isinstance(n, Neg):
            return -conv(n.arg)
        if isinstance(n, Pow):
            return conv(n.base) ** n.exp
        if isinstance(n, Div):
            den = conv(n.right)
            if den.is_zero():
                raise DivisionByZero(f"除以零: {print_expr(n.right)}")
            if not den.is_constant():
                raise UnsupportedGenerator(f"不能除以含 {var} 的表达式 '{print_expr(n.right)}'")
            return conv(n.left).scale(den.lc.inverse())
        if isinstance(n, Exp):
            raise UnsupportedGenerator("此处不允许出现 exp，请用 f 表示生成元")
        raise InvalidInput(f"未知节点 {n!r}")

    return conv(node)


def ast_to_laurent(node: Expr, nvars: int, q1: RatFun, p: MultiPoly, q2: RatFun) -> LaurentPoly:
    """
    把表达式读作 R^n[e^p, e^{-p}] 的元素

    f 代入 q1·w + q2，w 即 e^p，exp(k·p) 读作 w^k（k 为整数）；
    只允许除以 Laurent 单项式。
    """
    ring_map = _z_var_map(nvars)
    ring = poly_ring(nvars)
    p_rf = RatFun.from_poly(p)

    def const(r: RatFun) -> LaurentPoly:
        return LaurentPoly.monomial(r, 0)

    def conv(n: Expr) -> LaurentPoly:
        if isinstance(n, Const):
            return const(RatFun.from_scalar(n.value, nvars))
        if isinstance(n, Var):
            if n.name == 'w':
                return LaurentPoly.monomial(RatFun.one(nvars), 1)
            if n.name == 'f':
                return LaurentPoly(0, (q2, q1), nvars)
            if n.name in ring_map:
                return const(RatFun.from_poly(ring.gens[ring_map[n.name]]))
            raise UnsupportedGenerator(f"此处不允许出现变量 '{n.name}'")
        if isinstance(n, Add):
            return conv(n.left) + conv(n.right)
        if isinstance(n, Sub):
            return conv(n.left) - conv(n.right)
        if isinstance(n, Mul):
            return conv(n.left) * conv(n.right)
        if isinstance(n, Neg):
            return -conv(n.arg)
        if isinstance(n, Pow):
            return conv(n.base) ** n.exp
        if isinstance(n, Div):
            den = conv(n.right)
            if den.is_zero():
                raise DivisionByZero(f"除以零: {print_expr(n.right)}")
            if not den.is_monomial():
                raise UnsupportedGenerator(f"只能除以 Laurent 单项式，'{print_expr(n.right)}' 不是")
            return conv(n.left) * den ** -1
        if isinstance(n, Exp):
            arg = ast_to_ratfun(n.arg, nvars)
            ratio = arg / p_rf
            if not ratio.is_constant():
                raise UnsupportedGenerator(f"exp({print_expr(n.arg)}) 不是 e^p 的整数次幂")
            k = ratio.constant()
            frac = qq_to_fraction(k.x)
            if k.y or frac.denominator != 1:
                raise UnsupportedGenerator(f"exp({print_expr(n.arg)}) 不是 e^p 的整数次幂")
            return LaurentPoly.monomial(RatFun.one(nvars), int(frac))
        raise InvalidInput(f"未知节点 {n!r}")

    return conv(node)


class ExpSum:
    """指数和的规范形式：指数多项式 -> 有理函数系数（系数非零）"""

    __slots__ = ('terms', 'nvars')

    def __init__(self, terms: Dict[MultiPoly, RatFun], nvars: int):
        self.terms = {p: r for p, r in terms.items() if not r.is_zero()}
        self.nvars = nvars

    @classmethod
    def rational(cls, r: RatFun) -> 'ExpSum':
        return cls({poly_ring(r.nvars).zero: r}, r.nvars)

    def __add__(self, other: 'ExpSum') -> 'ExpSum':
        merged = dict(self.terms)
        for p, r in other.terms.items():
            merged[p] = merged[p] + r if p in merged else r
        return ExpSum(merged, self.nvars)

    def __neg__(self) -> 'ExpSum':
        return ExpSum({p: -r for p, r in self.terms.items()}, self.nvars)

    def __sub__(self, other: 'ExpSum') -> 'ExpSum':
        return self + (-other)

    def __mul__(self, other: 'ExpSum') -> 'ExpSum':
        out: Dict[MultiPoly, RatFun] = {}
        for p1, r1 in self.terms.items():
            for p2, r2 in other.terms.items():
                p = p1 + p2
                r = r1 * r2
                out[p] = out[p] + r if p in out else r
        return ExpSum(out, self.nvars)

    def __pow__(self, k: int) -> 'ExpSum':
        result = ExpSum.rational(RatFun.one(self.nvars))
        for _ in range(k):
            result = result * self
        return result

    def exponents(self) -> List[MultiPoly]:
        """非零指数，按 grlex 降序排列"""
        return sorted((p for p in self.terms if p), key=_exp_sort_key, reverse=True)

    def rational_part(self) -> RatFun:
        zero = poly_ring(self.nvars).zero
        return self.terms.get(zero, RatFun.zero(self.nvars))

    def is_rational(self) -> bool:
        return all(not p for p in self.terms)

    def __repr__(self) -> str:
        return f"ExpSum({ {print_poly(p): print_ratfun(r) for p, r in self.terms.items()} })"


def _exp_sort_key(p: MultiPoly):
    return [(sum(m), m, (qq_to_fraction(c.x), qq_to_fraction(c.y))) for m, c in p.terms()]


def ast_to_expsum(node: Expr, nvars: int) -> ExpSum:
    """
    把含 exp 的表达式化为 Σ r_j·e^{p_j}

    exp 的参数必须是多项式；不允许除以含指数的表达式。
    """
    def conv(n: Expr) -> ExpSum:
        if isinstance(n, (Const, Var)):
            return ExpSum.rational(ast_to_ratfun(n, nvars))
        if isinstance(n, Add):
            return conv(n.left) + conv(n.right)
        if isinstance(n, Sub):
            return conv(n.left) - conv(n.right)
        if isinstance(n, Mul):
            return conv(n.left) * conv(n.right)
        if isinstance(n, Neg):
            return -conv(n.arg)
        if isinstance(n, Pow):
            return conv(n.base) ** n.exp
        if isinstance(n, Div):
            den = conv(n.right)
            if not den.is_rational():
                raise UnsupportedGenerator(f"不能除以含指数的表达式 '{print_expr(n.right)}'")
            den_r = den.rational_part()
            if den_r.is_zero():
                raise DivisionByZero(f"除以零: {print_expr(n.right)}")
            return conv(n.left) * ExpSum.rational(den_r.inverse())
        if isinstance(n, Exp):
            arg = conv(n.arg)
            if not arg.is_rational():
                raise UnsupportedGenerator(f"exp 的参数 '{print_expr(n.arg)}' 不是多项式")
            r = arg.rational_part()
            if not r.is_polynomial():
                raise UnsupportedGenerator(f"exp 的参数 '{print_expr(n.arg)}' 不是多项式")
            p = r.num.quo_ground(poly_constant(r.den))
            return ExpSum({p: RatFun.one(nvars)}, nvars)
        raise InvalidInput(f"未知节点 {n!r}")

    return conv(node)
