"""
增长指标的数值估计

把 Σ r_j·e^{p_j} 限制到复直线 z = a + b·ζ 上，用对数空间的 log-sum-exp
计算 log|f(r e^{iθ})|，估计阶 ρ 与指标函数 h_{f,ρ}(θ)，并检验正弦凸性与正弦型拟合。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.arith_core import MultiPoly, poly_ring, scalar_to_complex, to_scalar
from core.config import POLY_GROWTH_TOL, IndicatorConfig
from core.errors import InsufficientGrid, InvalidInput, NotEntire, OverflowAtAllRadii
from core.expr_core import Expr, ExpSum, ast_to_expsum, max_var_index

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# 间隔与 π/ρ 的相对差小于此值时视为等于 π/ρ，三元组不参与检查
GAP_RTOL = 1e-9
# 正弦拟合时重新求最大偏差最优振幅的相位个数
REFINE_CANDIDATES = 8


@dataclass(frozen=True)
class SectorSpec:
    """扇形 {r e^{iθ}: r > r0, alpha < θ < beta}"""

    alpha: float = 0.0
    beta: float = TWO_PI
    r0: float = 0.0

    def __post_init__(self):
        width = self.beta - self.alpha
        if not (0.0 < width <= TWO_PI + 1e-12):
            raise InvalidInput(f"扇形宽度 {width} 不在 (0, 2π] 内")
        if self.r0 < 0:
            raise InvalidInput("r0 不能为负")

    @property
    def full_circle(self) -> bool:
        return self.beta - self.alpha >= TWO_PI - 1e-12

    def thetas(self, n: int) -> np.ndarray:
        width = self.beta - self.alpha
        if self.full_circle:
            return self.alpha + width * np.arange(n) / n
        return self.alpha + width * (np.arange(n) + 0.5) / n


@dataclass(frozen=True)
class LineSpec:
    """复直线 z = point + direction·ζ（多变量时的一维切片）"""

    point: Tuple[complex, ...] = ()
    direction: Tuple[complex, ...] = ()

    def resolved(self, nvars: int) -> Tuple[Tuple, Tuple]:
        point = self.point or (0,) * nvars
        direction = self.direction or (1,) * nvars
        if len(point) != nvars or len(direction) != nvars:
            raise InvalidInput(f"直线参数维数应为 {nvars}")
        return point, direction


@dataclass
class IndicatorProfile:
    rho: float
    thetas: np.ndarray
    hvals: np.ndarray
    radii: np.ndarray
    full_circle: bool = False
    flagged: int = 0
    meta: dict = field(default_factory=dict)

    def as_table(self) -> List[dict]:
        return [{"theta": float(t), "h": _json_float(h)} for t, h in zip(self.thetas, self.hvals)]


@dataclass(frozen=True)
class SinusoidFit:
    a: float
    theta0: float
    residual: float
    rho: float = 1.0

    def as_dict(self) -> dict:
        return {"a": self.a, "theta0": self.theta0, "residual": self.residual, "rho": self.rho}


@dataclass(frozen=True)
class Violation:
    theta1: float
    theta: float
    theta2: float
    excess: float


def _json_float(x: float):
    if math.isfinite(x):
        return float(x)
    return "inf" if x > 0 else "-inf"


@dataclass(frozen=True)
class _Term:
    """r(ζ)·e^{p(ζ)}，系数按降幂排列"""

    num: np.ndarray
    den: complex
    expo: np.ndarray


def _restrict_poly(p: MultiPoly, point, direction) -> List[complex]:
    """精确计算 p(point + direction·ζ) 的系数（升幂）"""
    ring1 = poly_ring(1)
    zeta = ring1.gens[0]
    lines = [ring1.ground_new(to_scalar(a)) + zeta.mul_ground(to_scalar(b))
             for a, b in zip(point, direction)]
    out = ring1.zero
    for monom, c in p.terms():
        term = ring1.ground_new(c)
        for lin, e in zip(lines, monom):
            if e:
                term = term * lin ** e
        out += term
    if not out:
        return [0j]
    return [scalar_to_complex(out.get((k,), ring1.domain.zero)) for k in range(out.degree() + 1)]


def restrict_expsum(es: ExpSum, line: LineSpec) -> List[_Term]:
    """把指数和限制到直线上；系数必须是多项式"""
    point, direction = line.resolved(es.nvars)
    terms = []
    for p, r in es.terms.items():
        if not r.den.is_ground:
            raise NotEntire(f"系数的分母 {r.den.as_expr()} 不是常数，表达式不是整函数")
        num = _restrict_poly(r.num, point, direction)
        den = scalar_to_complex(r.den.coeff(1))
        expo = _restrict_poly(p, point, direction)
        terms.append(_Term(num=np.array(num[::-1]), den=den, expo=np.array(expo[::-1])))
    return terms


def _log_poly(coeffs_desc: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """
    log p(ζ)（复对数），|ζ| > 1 时按 ζ^d·Σ c_k ζ^{k-d} 缩放求值
    """
    deg = len(coeffs_desc) - 1
    with np.errstate(divide='ignore', invalid='ignore'):
        if deg == 0:
            return np.full(zeta.shape, np.log(complex(coeffs_desc[0])), dtype=complex)
        big = np.abs(zeta) > 1.0
        out = np.empty(zeta.shape, dtype=complex)
        # 大模长：Σ c_k ζ^{k-d} 是 1/ζ 的多项式，系数顺序反过来
        inv = 1.0 / zeta[big]
        scaled = np.polyval(coeffs_desc[::-1], inv)
        out[big] = deg * np.log(zeta[big]) + np.log(scaled)
        out[~big] = np.log(np.polyval(coeffs_desc, zeta[~big]))
    return out


def log_abs_values(terms: Sequence[_Term], zeta: np.ndarray,
                   cancel_tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    log|Σ r_j(ζ) e^{p_j(ζ)}|，用 log-sum-exp 避免溢出

    返回:
    Tuple[np.ndarray, np.ndarray]: (log|f|, 抵消标记)
    """
    logs = []
    for t in terms:
        with np.errstate(divide='ignore', invalid='ignore'):
            lv = _log_poly(t.num, zeta) - np.log(t.den) + np.polyval(t.expo, zeta)
        logs.append(lv)
    L = np.stack(logs)
    re = np.where(np.isfinite(L.real), L.real, -np.inf)
    top = np.max(re, axis=0)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(invalid='ignore', over='ignore'):
        s = np.sum(np.where(np.isfinite(re), np.exp(re - safe_top + 1j * L.imag), 0.0), axis=0)
    with np.errstate(divide='ignore'):
        result = np.where(np.isfinite(top), safe_top + np.log(np.abs(s)), -np.inf)

    flags = np.zeros(zeta.shape, dtype=bool)
    if len(terms) >= 2:
        order = np.argsort(-re, axis=0)
        first = np.take_along_axis(re, order[:1], axis=0)[0]
        second = np.take_along_axis(re, order[1:2], axis=0)[0]
        ph1 = np.take_along_axis(L.imag, order[:1], axis=0)[0]
        ph2 = np.take_along_axis(L.imag, order[1:2], axis=0)[0]
        opposite = np.abs(np.angle(np.exp(1j * (ph1 - ph2)))) > math.pi - 1e-6
        with np.errstate(invalid='ignore'):
            close = np.abs(first - second) <= cancel_tol * np.maximum(1.0, np.abs(first))
        flags = close & opposite & np.isfinite(first)
    return result, flags


def _prepare(expr: Expr, line: Optional[LineSpec]) -> List[_Term]:
    nvars = max(1, max_var_index(expr))
    es = ast_to_expsum(expr, nvars)
    if not es.terms:
        raise InvalidInput("零函数没有增长阶")
    return restrict_expsum(es, line or LineSpec())


def _grid(radii: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    return radii[:, None] * np.exp(1j * thetas[None, :])


def _valid_suffix(mask: np.ndarray) -> int:
    """末尾连续有效样本的起始下标"""
    start = len(mask)
    while start > 0 and mask[start - 1]:
        start -= 1
    return start


def estimate_order(expr: Expr, cfg: Optional[IndicatorConfig] = None,
                   line: Optional[LineSpec] = None) -> float:
    """
    估计整函数的阶

    先检查 log M(r) 是否关于 log r 线性（多项式增长，阶为 0），
    否则对半径表后半段做 log log M(r) ~ log r 的回归，返回斜率。
    """
    cfg = cfg or IndicatorConfig()
    terms = _prepare(expr, line)
    radii = np.array(cfg.radii())
    thetas = TWO_PI * np.arange(cfg.n_theta) / cfg.n_theta
    logf, _ = log_abs_values(terms, _grid(radii, thetas).ravel(), cfg.cancel_tol)
    logf = logf.reshape(len(radii), len(thetas))
    with np.errstate(invalid='ignore'):
        log_m = np.max(np.where(np.isnan(logf), -np.inf, logf), axis=1)
    valid = np.isfinite(log_m)
    if not valid.any():
        raise OverflowAtAllRadii("所有半径上的采样都无效")
    start = _valid_suffix(valid)
    if len(radii) - start < 3:
        raise OverflowAtAllRadii("有效半径不足 3 个")
    window = slice(start + (len(radii) - start) // 2, len(radii))
    log_r = np.log(radii[window])
    lm = log_m[window]

    slope, intercept = np.polyfit(log_r, lm, 1)
    residual = np.max(np.abs(slope * log_r + intercept - lm)) / max(1.0, float(np.max(np.abs(lm))))
    if residual < POLY_GROWTH_TOL:
        logger.debug(f"log M(r) 与 log r 线性相关 (斜率 {slope:.3f})，阶为 0")
        return 0.0
    positive = lm > 0
    if positive.sum() < 2:
        raise OverflowAtAllRadii("log M(r) 在尾段不为正，无法估计阶")
    order = float(np.polyfit(log_r[positive], np.log(lm[positive]), 1)[0])
    logger.debug(f"阶估计: {order:.4f}，半径窗口 [{radii[window][0]:.1f}, {radii[window][-1]:.1f}]")
    return order


def estimate_indicator(expr: Expr, rho: float, sector: Optional[SectorSpec] = None,
                       cfg: Optional[IndicatorConfig] = None,
                       line: Optional[LineSpec] = None) -> IndicatorProfile:
    """
    估计指标函数 h(θ) = limsup log|f(r e^{iθ})| / r^ρ

    limsup 取为半径表后半段上的最大值。
    """
    if rho <= 0:
        raise InvalidInput("ρ 必须为正")
    cfg = cfg or IndicatorConfig()
    sector = sector or SectorSpec()
    terms = _prepare(expr, line)
    radii = np.array([r for r in cfg.radii() if r > sector.r0])
    if len(radii) < 2:
        raise InvalidInput("r0 之外的半径不足")
    tail = radii[len(radii) // 2:]
    thetas = sector.thetas(cfg.n_theta)
    logf, flags = log_abs_values(terms, _grid(tail, thetas).ravel(), cfg.cancel_tol)
    logf = logf.reshape(len(tail), len(thetas))
    scaled = logf / tail[:, None] ** rho
    with np.errstate(invalid='ignore'):
        scaled = np.where(np.isnan(scaled), -np.inf, scaled)
    hvals = np.max(scaled, axis=0)
    flagged = int(flags.sum())
    if flagged:
        logger.warning(f"{flagged} 个采样点的主导项相互抵消")
    if not np.isfinite(hvals).all():
        logger.warning("部分角度上的指标值不是有限数")
    return IndicatorProfile(
        rho=float(rho),
        thetas=thetas,
        hvals=hvals,
        radii=tail,
        full_circle=sector.full_circle,
        flagged=flagged,
        meta={"sector": {"alpha": sector.alpha, "beta": sector.beta, "r0": sector.r0}, **cfg.as_dict()},
    )


def check_sine_inequality(profile: IndicatorProfile, slack: Optional[float] = None) -> List[Violation]:
    """
    检验 ρ-三角凸性：对 θ1 < θ < θ2，θ2 - θ1 < π/ρ，
    h(θ) <= [h(θ1) sin ρ(θ2-θ) + h(θ2) sin ρ(θ-θ1)] / sin ρ(θ2-θ1) + slack

    返回:
    List[Violation]: 违反的三元组
    """
    slack = IndicatorConfig().sine_slack if slack is None else slack
    n = len(profile.thetas)
    if n < 3:
        raise InsufficientGrid(f"网格只有 {n} 个点")
    rho = profile.rho
    thetas = np.asarray(profile.thetas, dtype=float)
    h = np.asarray(profile.hvals, dtype=float)
    if profile.full_circle:
        thetas = np.concatenate([thetas, thetas + TWO_PI])
        h = np.concatenate([h, h])
    span = math.pi / rho * (1.0 - GAP_RTOL)
    violations: List[Violation] = []
    for i in range(n):
        if not np.isfinite(h[i]):
            continue
        for k in range(i + 2, len(thetas)):
            gap = thetas[k] - thetas[i]
            if gap >= span or k - i >= n:
                break
            if not np.isfinite(h[k]):
                continue
            mid = np.arange(i + 1, k)
            th = thetas[mid]
            bound = (h[i] * np.sin(rho * (thetas[k] - th)) + h[k] * np.sin(rho * (th - thetas[i]))) \
                / np.sin(rho * gap)
            excess = h[mid] - bound - slack
            for j in np.nonzero(np.isfinite(excess) & (excess > 0))[0]:
                violations.append(Violation(
                    theta1=float(thetas[i]),
                    theta=float(th[j] % TWO_PI if profile.full_circle else th[j]),
                    theta2=float(thetas[k]),
                    excess=float(excess[j]),
                ))
    logger.debug(f"正弦不等式检查: {len(violations)} 个违反")
    return violations


def _minimax_amplitude(s: np.ndarray, h: np.ndarray, iterations: int = 100) -> Tuple[float, float]:
    """
    固定相位下使 max|a·s - h| 最小的 a >= 0（关于 a 是凸函数，三分搜索）

    返回:
    Tuple[float, float]: (a, 残差)
    """
    def cost(a: float) -> float:
        return float(np.max(np.abs(a * s - h)))

    s_max = float(np.max(np.abs(s)))
    if s_max == 0.0:
        return 0.0, cost(0.0)
    lo, hi = 0.0, 2.0 * float(np.max(np.abs(h))) / s_max
    for _ in range(iterations):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if cost(m1) <= cost(m2):
            hi = m2
        else:
            lo = m1
    a = 0.5 * (lo + hi)
    return a, cost(a)


def check_sinusoidal(profile: IndicatorProfile, tol: Optional[float] = None,
                     phase_step: Optional[float] = None) -> Optional[SinusoidFit]:
    """
    拟合 h(θ) ≈ a·sin ρ(θ - θ0)，a >= 0

    θ0 在 [-π/ρ, π/ρ) 上按步长网格搜索，每个 θ0 先取最小二乘最优的 a 并以最大绝对偏差排序，
    再对排名靠前的若干相位重新求使最大偏差最小的 a。报告的残差是网格上的最大偏差，
    受相位步长限制，可能略高于连续相位下可达到的最小值。
    """
    defaults = IndicatorConfig()
    tol = defaults.sinusoid_tol if tol is None else tol
    phase_step = defaults.phase_step if phase_step is None else phase_step
    h = np.asarray(profile.hvals, dtype=float)
    if not np.isfinite(h).all():
        logger.warning("指标值含非有限数，无法拟合正弦")
        return None
    rho = profile.rho
    theta0 = np.arange(-math.pi / rho, math.pi / rho, phase_step)
    S = np.sin(rho * (np.asarray(profile.thetas)[None, :] - theta0[:, None]))
    norm = np.sum(S * S, axis=1)
    a = np.maximum(0.0, (S @ h) / np.where(norm > 0, norm, 1.0))
    residual = np.max(np.abs(a[:, None] * S - h[None, :]), axis=1)
    best_a, best_theta0, best_residual = 0.0, 0.0, math.inf
    for idx in np.argsort(residual)[:REFINE_CANDIDATES]:
        amp, res = _minimax_amplitude(S[idx], h)
        if res > residual[idx]:
            amp, res = float(a[idx]), float(residual[idx])
        if res < best_residual:
            best_a, best_theta0, best_residual = amp, float(theta0[idx]), res
    fit = SinusoidFit(a=best_a, theta0=best_theta0, residual=best_residual, rho=rho)
    logger.debug(f"正弦拟合: a={fit.a:.4f}, θ0={fit.theta0:.4f}, 残差 {fit.residual:.4f}")
    if fit.residual > tol:
        return None
    return fit


def exact_exp_indicator(p: MultiPoly, line: Optional[LineSpec] = None) -> SinusoidFit:
    """
    e^p 的精确指标：沿直线 p(ζ) 的首项 c·ζ^n 给出 h(θ) = |c| sin n(θ - θ0)
    """
    point, direction = (line or LineSpec()).resolved(p.ring.ngens)
    coeffs = _restrict_poly(p, point, direction)
    n = len(coeffs) - 1
    if n < 1 or coeffs[-1] == 0:
        raise InvalidInput("p 沿该直线是常数")
    c = coeffs[-1]
    # Re(c e^{inθ}) = |c| sin(nθ + arg c + π/2)
    theta0 = -(np.angle(c) + math.pi / 2) / n
    period = TWO_PI / n
    theta0 = (theta0 + math.pi / n) % period - math.pi / n
    return SinusoidFit(a=float(abs(c)), theta0=float(theta0), residual=0.0, rho=float(n))


@dataclass(frozen=True)
class AlmostSinusoidal:
    holds: bool
    interval: Optional[Tuple[float, float]]


def _cyclic_runs(mask: np.ndarray, cyclic: bool) -> List[Tuple[int, int]]:
    """mask 中连续 True 段的 (起点, 长度)"""
    n = len(mask)
    if mask.all():
        return [(0, n)]
    runs = []
    start = None
    for k in range(n):
        if mask[k] and start is None:
            start = k
        if not mask[k] and start is not None:
            runs.append((start, k - start))
            start = None
    if start is not None:
        runs.append((start, n - start))
    if cyclic and len(runs) >= 2 and runs[0][0] == 0 and runs[-1][0] + runs[-1][1] == n:
        last = runs.pop()
        first = runs.pop(0)
        runs.append((last[0], last[1] + first[1]))
    return runs


def check_almost_sinusoidal(pos: IndicatorProfile, neg: IndicatorProfile,
                            slack: Optional[float] = None) -> AlmostSinusoidal:
    """
    检查 e^p 与 e^{-p} 的指标是否“几乎正弦”：
    h_{e^{-p}} < 0 的角度构成一个非空区间，在其余角度上 h_{e^p} <= 0（允许 slack）
    """
    slack = IndicatorConfig().sine_slack if slack is None else slack
    if len(pos.thetas) != len(neg.thetas) or not np.allclose(pos.thetas, neg.thetas):
        raise InvalidInput("两个指标需要相同的角度网格")
    negative = np.asarray(neg.hvals) < -slack
    runs = _cyclic_runs(negative, pos.full_circle)
    if len(runs) != 1:
        return AlmostSinusoidal(holds=False, interval=None)
    rest_ok = bool(np.all(np.asarray(pos.hvals)[~negative] <= slack))
    start, length = runs[0]
    n = len(pos.thetas)
    thetas = np.asarray(pos.thetas)
    lo = float(thetas[start])
    end = (start + length - 1) % n
    hi = float(thetas[end] + (TWO_PI if end < start else 0.0))
    return AlmostSinusoidal(holds=rest_ok, interval=(lo, hi))
