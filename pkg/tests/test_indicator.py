#!/usr/bin/env python3
"""
测试增长阶与指标函数的数值估计
"""

import math

import numpy as np
import pytest

from core.arith_core import poly_ring
from core.config import IndicatorConfig
from core.errors import InsufficientGrid, InvalidInput, NotEntire, OverflowAtAllRadii
from core.expr_core import ast_to_expsum, ast_to_poly, parse_expr
from core.indicator_core import (
    TWO_PI,
    IndicatorProfile,
    LineSpec,
    SectorSpec,
    check_almost_sinusoidal,
    check_sine_inequality,
    check_sinusoidal,
    estimate_indicator,
    estimate_order,
    exact_exp_indicator,
    log_abs_values,
    restrict_expsum,
)


def profile_of(text, rho, sector=None, cfg=None, line=None):
    return estimate_indicator(parse_expr(text), rho, sector, cfg, line)


@pytest.mark.parametrize("text,expected", [
    ("exp(z)", 1.0),
    ("exp(z^2)+z^5", 2.0),
    ("z^3", 0.0),
    ("exp(z)+exp(-z)", 1.0),
    ("(2-i)*exp(i*z^3) + z", 3.0),
])
def test_estimate_order(text, expected):
    assert abs(estimate_order(parse_expr(text)) - expected) <= 0.05


def test_estimate_order_exp_square_window():
    order = estimate_order(parse_expr("exp(z^2)"))
    assert 1.95 <= order <= 2.05


def test_estimate_order_multivariate_slice():
    """exp(z1·z2) 沿默认直线 z1 = z2 = ζ 是 exp(ζ^2)"""
    assert abs(estimate_order(parse_expr("exp(z1*z2)")) - 2.0) <= 0.05
    line = LineSpec(point=(0, 1), direction=(1, 0))
    assert abs(estimate_order(parse_expr("exp(z1*z2)"), line=line) - 1.0) <= 0.05


def test_estimate_order_errors():
    with pytest.raises(NotEntire):
        estimate_order(parse_expr("exp(z)/z"))
    with pytest.raises(InvalidInput):
        estimate_order(parse_expr("exp(z)-exp(z)"))
    with pytest.raises(OverflowAtAllRadii):
        estimate_order(parse_expr("exp(z)"), IndicatorConfig(r_steps=2))
    with pytest.raises(InvalidInput):
        estimate_order(parse_expr("exp(z1*z2)"), line=LineSpec(point=(0,), direction=(1,)))


def test_log_abs_values_large_arguments():
    """e^{ζ^2} 在 |ζ| = 1000 处不溢出"""
    terms = restrict_expsum(ast_to_expsum(parse_expr("exp(z^2) + 1"), 1), LineSpec())
    zeta = np.array([1000.0 + 0j, 1000j])
    logf, flags = log_abs_values(terms, zeta, 1e-12)
    assert logf[0] == pytest.approx(1e6)
    assert logf[1] == pytest.approx(0.0, abs=1e-9)
    assert not flags.any()


def test_log_abs_values_flags_cancellation():
    """e^z - e^{-z} 在虚轴上两项模长相等、相位相反"""
    terms = restrict_expsum(ast_to_expsum(parse_expr("exp(z) - exp(-z)"), 1), LineSpec())
    zeta = np.array([math.pi * 1j, 3.0 + 0j])
    _, flags = log_abs_values(terms, zeta, 1e-12)
    assert flags[0]
    assert not flags[1]


def test_indicator_exp_z():
    profile = profile_of("exp(z)", 1.0)
    assert len(profile.thetas) == 64
    assert np.max(np.abs(profile.hvals - np.cos(profile.thetas))) <= 0.02


def test_indicator_exp_minus_z():
    profile = profile_of("exp(-z)", 1.0)
    assert np.max(np.abs(profile.hvals + np.cos(profile.thetas))) <= 0.02


def test_indicator_exp_i_z_squared():
    profile = profile_of("exp(i*z^2)", 2.0)
    assert np.max(np.abs(profile.hvals + np.sin(2 * profile.thetas))) <= 0.02


def test_indicator_exp_monomial_property():
    """exp(c z^n) 的指标是 |c| cos(nθ + arg c)"""
    c = complex(2, -1)
    profile = profile_of("(2-i)*exp((2-i)*z^3)", 3.0)
    expected = abs(c) * np.cos(3 * profile.thetas + np.angle(c))
    assert np.max(np.abs(profile.hvals - expected)) <= 0.02
    assert check_sine_inequality(profile, 1e-3) == []


def test_indicator_sector():
    sector = SectorSpec(alpha=-math.pi / 2, beta=math.pi / 2, r0=10.0)
    profile = profile_of("exp(z)", 1.0, sector)
    assert not profile.full_circle
    assert profile.thetas[0] > -math.pi / 2
    assert profile.thetas[-1] < math.pi / 2
    assert np.all(profile.radii > 10.0)
    assert profile.meta["sector"] == {"alpha": -math.pi / 2, "beta": math.pi / 2, "r0": 10.0}


def test_indicator_errors():
    with pytest.raises(InvalidInput):
        profile_of("exp(z)", 0.0)
    with pytest.raises(InvalidInput):
        profile_of("exp(z)", 1.0, SectorSpec(r0=1e12))
    with pytest.raises(InvalidInput):
        SectorSpec(alpha=1.0, beta=1.0)
    with pytest.raises(InvalidInput):
        SectorSpec(r0=-1.0)


def test_profile_table_serializes_infinities():
    profile = IndicatorProfile(rho=1.0, thetas=np.array([0.0, 1.0]), hvals=np.array([0.5, -np.inf]),
                               radii=np.array([1.0]))
    assert profile.as_table() == [{"theta": 0.0, "h": 0.5}, {"theta": 1.0, "h": "-inf"}]


def test_sine_inequality_holds_for_exp_z():
    profile = profile_of("exp(z)", 1.0)
    assert check_sine_inequality(profile, 1e-3) == []


def test_default_grid_has_gaps_of_exactly_pi():
    """64 点网格上 32 步的间隔等于 π（浮点误差以内）"""
    thetas = profile_of("exp(z)", 1.0).thetas
    assert abs((thetas[40] - thetas[8]) - math.pi) < 1e-12


@pytest.mark.parametrize("text,rho,n_theta", [
    ("exp(z)", 1.0, 64),
    ("exp(-z)", 1.0, 64),
    ("exp(z)", 1.0, 63),
    ("exp(z^2)", 2.0, 64),
    ("exp(i*z^2)", 2.0, 64),
    ("exp(-z^2)", 2.0, 50),
    ("exp(z^3)", 3.0, 60),
    ("exp((1+i)*z^3)", 3.0, 64),
])
def test_sine_inequality_exp_polynomials(text, rho, n_theta):
    """e^p 的指标是正弦型，任意网格上都没有违反"""
    profile = profile_of(text, rho, cfg=IndicatorConfig(n_theta=n_theta))
    assert check_sine_inequality(profile, 1e-3) == []


@pytest.mark.parametrize("text,rho,alpha,beta", [
    ("exp(z)", 1.0, -math.pi / 2, math.pi / 2),
    ("exp(i*z^2)", 2.0, 0.0, math.pi / 2),
    ("exp(z^3)", 3.0, -1.0, 1.0),
])
def test_sine_inequality_on_sector(text, rho, alpha, beta):
    profile = profile_of(text, rho, SectorSpec(alpha=alpha, beta=beta))
    assert not profile.full_circle
    assert check_sine_inequality(profile, 1e-3) == []


def test_sine_inequality_detects_injected_bump():
    profile = profile_of("exp(z)", 1.0)
    idx = 16
    bumped = IndicatorProfile(
        rho=profile.rho,
        thetas=profile.thetas,
        hvals=profile.hvals.copy(),
        radii=profile.radii,
        full_circle=True,
    )
    bumped.hvals[idx] += 1.0
    violations = check_sine_inequality(bumped, 1e-3)
    assert violations
    assert all(v.theta == pytest.approx(profile.thetas[idx]) for v in violations)


def test_sine_inequality_needs_three_points():
    profile = IndicatorProfile(rho=1.0, thetas=np.array([0.0, 1.0]), hvals=np.array([0.0, 0.0]),
                               radii=np.array([1.0]))
    with pytest.raises(InsufficientGrid):
        check_sine_inequality(profile)


def test_sinusoid_fit_exp_z():
    fit = check_sinusoidal(profile_of("exp(z)", 1.0))
    assert fit is not None
    assert fit.a == pytest.approx(1.0, abs=0.01)
    assert fit.theta0 == pytest.approx(-math.pi / 2, abs=2e-3)
    assert fit.residual < 0.05


def test_sinusoid_fit_exp_z_squared():
    fit = check_sinusoidal(profile_of("exp(z^2)", 2.0))
    assert fit is not None
    assert fit.a == pytest.approx(1.0, abs=0.01)
    assert fit.theta0 == pytest.approx(-math.pi / 4, abs=2e-3)


def test_sinusoid_fit_minimizes_max_deviation():
    """sin θ 在 θ = π/2 处加 0.3 的尖峰：最小二乘振幅约 1.009，最大偏差最优振幅是 1.15"""
    thetas = TWO_PI * np.arange(64) / 64
    hvals = np.sin(thetas)
    hvals[16] += 0.3
    profile = IndicatorProfile(rho=1.0, thetas=thetas, hvals=hvals, radii=np.array([1.0]), full_circle=True)
    fit = check_sinusoidal(profile, tol=1.0)
    assert fit is not None
    assert fit.a == pytest.approx(1.15, abs=0.01)
    assert fit.residual < 0.16
    assert fit.theta0 == pytest.approx(0.0, abs=2e-3)


def test_sinusoid_fit_rejects_abs_cosine():
    assert check_sinusoidal(profile_of("exp(z)+exp(-z)", 1.0)) is None


def test_sinusoid_fit_rejects_non_finite():
    profile = IndicatorProfile(rho=1.0, thetas=np.array([0.0, 1.0, 2.0]),
                               hvals=np.array([0.0, -np.inf, 0.0]), radii=np.array([1.0]))
    assert check_sinusoidal(profile) is None


@pytest.mark.parametrize("text,a,theta0,rho", [
    ("z", 1.0, -math.pi / 2, 1.0),
    ("z^2", 1.0, -math.pi / 4, 2.0),
    ("i*z^2", 1.0, -math.pi / 2, 2.0),
    ("3*z", 3.0, -math.pi / 2, 1.0),
])
def test_exact_exp_indicator(text, a, theta0, rho):
    p = ast_to_poly(parse_expr(text), 1)
    fit = exact_exp_indicator(p)
    assert fit.a == pytest.approx(a)
    assert fit.theta0 == pytest.approx(theta0)
    assert fit.rho == rho


def test_exact_exp_indicator_matches_numeric_fit():
    p = poly_ring(1).gens[0] ** 2
    exact = exact_exp_indicator(p)
    fit = check_sinusoidal(profile_of("exp(z^2)", 2.0))
    assert fit.theta0 == pytest.approx(exact.theta0, abs=2e-3)


def test_exact_exp_indicator_constant_along_line():
    z1, z2 = poly_ring(2).gens
    with pytest.raises(InvalidInput):
        exact_exp_indicator(z1 - z2)


def test_almost_sinusoidal_exp_z():
    pos = profile_of("exp(z)", 1.0)
    neg = profile_of("exp(-z)", 1.0)
    result = check_almost_sinusoidal(pos, neg)
    assert result.holds
    lo, hi = result.interval
    # e^{-z} 的指标在 (-π/2, π/2) 上为负，区间跨过 θ = 0
    assert lo > math.pi
    assert hi > 2 * math.pi


def test_almost_sinusoidal_fails_for_cosh():
    profile = profile_of("exp(z)+exp(-z)", 1.0)
    assert not check_almost_sinusoidal(profile, profile).holds


def test_almost_sinusoidal_needs_same_grid():
    pos = profile_of("exp(z)", 1.0)
    neg = profile_of("exp(-z)", 1.0, cfg=IndicatorConfig(n_theta=32))
    with pytest.raises(InvalidInput):
        check_almost_sinusoidal(pos, neg)
