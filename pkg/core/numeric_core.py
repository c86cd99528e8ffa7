"""
数值交叉校验：在随机复采样点上验证符号恒等式
"""

import cmath
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from core.arith_core import MultiPoly, RatFun, scalar_to_complex
from core.config import SAMPLE_BOX, SAMPLE_POINTS, SAMPLE_SEED, get_precision
from core.upoly_core import LaurentPoly, UPoly

logger = logging.getLogger(__name__)


def poly_values(p: MultiPoly, points: np.ndarray) -> np.ndarray:
    """
    多项式在一组复点上的取值

    参数:
    p (MultiPoly): 多项式
    points (np.ndarray): 形状 (N, nvars) 的复数组

    返回:
    np.ndarray: 形状 (N,) 的复数组
    """
    out = np.zeros(points.shape[0], dtype=complex)
    for monom, c in p.terms():
        term = np.full(points.shape[0], scalar_to_complex(c), dtype=complex)
        for k, e in enumerate(monom):
            if e:
                term = term * points[:, k] ** e
        out += term
    return out


def ratfun_values(r: RatFun, points: np.ndarray) -> np.ndarray:
    return poly_values(r.num, points) / poly_values(r.den, points)


def upoly_values(u: UPoly, x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Horner 求 u(x)，系数在 points 上取值"""
    acc = np.zeros(points.shape[0], dtype=complex)
    for c in reversed(u.coeffs):
        acc = acc * x + ratfun_values(c, points)
    return acc


def laurent_values(lp: LaurentPoly, w: np.ndarray, points: np.ndarray) -> np.ndarray:
    if lp.is_zero():
        return np.zeros(points.shape[0], dtype=complex)
    return upoly_values(lp.body(), w, points) * w ** lp.lo


def sample_points(nvars: int, count: int = SAMPLE_POINTS, avoid: Sequence[RatFun] = (),
                  seed: int = SAMPLE_SEED, box: float = SAMPLE_BOX) -> np.ndarray:
    """
    在 [-box, box]^2 方形（实部、虚部）中生成远离极点的随机采样点

    参数:
    avoid (Sequence[RatFun]): 需要避开其分母零点的有理函数
    """
    rng = np.random.default_rng(seed)
    chosen: List[np.ndarray] = []
    attempts = 0
    while len(chosen) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("无法找到足够的非极点采样点")
        z = rng.uniform(-box, box, nvars) + 1j * rng.uniform(-box, box, nvars)
        pt = z.reshape(1, nvars)
        if all(abs(poly_values(r.den, pt)[0]) > 1e-6 for r in avoid):
            chosen.append(z)
    return np.array(chosen, dtype=complex)


def relative_errors(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.abs(lhs - rhs) / scale


@dataclass(frozen=True)
class NumericCheck:
    points: int
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "points": self.points,
            "max_rel_error": self.max_rel_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _coefficients(rep) -> List[RatFun]:
    return list(rep.coeffs)


def _generator_values(gen, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """exp 基底下返回 w = e^p 的值，generic 基底下 f 视为未定元，取随机复数"""
    if getattr(gen, 'kind', None) == 'exp_affine':
        return np.exp(poly_values(gen.p, points))
    return rng.uniform(-1.0, 1.0, points.shape[0]) + 1j * rng.uniform(-1.0, 1.0, points.shape[0])


def _element_values(elem, x: np.ndarray, points: np.ndarray) -> np.ndarray:
    if elem.basis == 'exp':
        return laurent_values(elem.rep, x, points)
    return upoly_values(elem.rep, x, points)


def check_division(h0, h1, quotient, gen, count: int = SAMPLE_POINTS,
                   tol: Optional[float] = None) -> NumericCheck:
    """
    在采样点上比较 quotient 与 h0/h1

    参数:
    h0, h1, quotient (AlgebraElement): 被除式、除式、商
    gen (GenDescriptor): 生成元
    """
    tol = get_precision() if tol is None else tol
    avoid = _coefficients(h0.rep) + _coefficients(h1.rep) + _coefficients(quotient.rep)
    points = sample_points(gen.nvars, count, avoid)
    rng = np.random.default_rng(SAMPLE_SEED + 1)
    x = _generator_values(gen, points, rng)
    lhs = _element_values(quotient, x, points)
    rhs = _element_values(h0, x, points) / _element_values(h1, x, points)
    err = float(np.max(relative_errors(lhs, rhs)))
    logger.debug(f"除法数值校验: {count} 个点, 最大相对误差 {err:.3e}")
    return NumericCheck(points=count, max_rel_error=err, tolerance=tol)


def family_values(family, points: np.ndarray, k: int) -> np.ndarray:
    """
    解族中 ε = e^{2πik/m} 对应的 f 在采样点上的值

    延迟根 u 取 unit_part 的主值 m 次根。
    """
    m = family.m
    eps = cmath.exp(2j * cmath.pi * k / m)
    if family.u is not None:
        u = ratfun_values(family.u, points)
    else:
        u = np.power(ratfun_values(family.unit_part, points), 1.0 / m)
    return eps * u * np.exp(poly_values(family.p, points) / m) - ratfun_values(family.q, points)


def check_solution_family(P: UPoly, R: RatFun, family, count: int = SAMPLE_POINTS,
                          tol: Optional[float] = None) -> NumericCheck:
    """对每个 m 次单位根 ε 验证 P(f) = R·e^p"""
    tol = get_precision() if tol is None else tol
    avoid = list(P.coeffs) + [R, family.q, family.unit_part]
    if family.u is not None:
        avoid.append(family.u)
    points = sample_points(R.nvars, count, avoid)
    rhs = ratfun_values(R, points) * np.exp(poly_values(family.p, points))
    worst = 0.0
    for k in range(family.m):
        f = family_values(family, points, k)
        lhs = upoly_values(P, f, points)
        worst = max(worst, float(np.max(relative_errors(lhs, rhs))))
    logger.debug(f"解族数值校验: m={family.m}, 最大相对误差 {worst:.3e}")
    return NumericCheck(points=count, max_rel_error=worst, tolerance=tol)
