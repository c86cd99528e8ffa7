"""
quasidiv 默认配置

数值容差可以通过环境变量 QUASIDIV_PRECISION 覆盖。
"""

import os
import logging
from dataclasses import dataclass
from typing import Tuple

logger = logging.getLogger(__name__)

SCHEMA = "quasidiv/1"

PRECISION_ENV = "QUASIDIV_PRECISION"
DEFAULT_PRECISION = 1e-9
SAMPLE_POINTS = 20
SAMPLE_BOX = 1.5
SAMPLE_SEED = 20240229

# 指标函数采样
RADIUS_START = 2.0
RADIUS_RATIO = 1.5
RADIUS_STEPS = 25
THETA_POINTS = 64
SINE_SLACK = 1e-3
SINUSOID_TOL = 0.05
PHASE_STEP = 1e-3
CANCEL_TOL = 1e-12
POLY_GROWTH_TOL = 1e-3


def get_precision() -> float:
    """
    读取数值校验容差

    返回:
    float: 环境变量 QUASIDIV_PRECISION 的值，无效时返回默认值 1e-9
    """
    raw = os.environ.get(PRECISION_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"{PRECISION_ENV}={raw!r} 无法解析，使用默认容差 {DEFAULT_PRECISION}")
        return DEFAULT_PRECISION
    if not value > 0.0:
        logger.warning(f"{PRECISION_ENV}={raw!r} 必须为正数，使用默认容差 {DEFAULT_PRECISION}")
        return DEFAULT_PRECISION
    return value


@dataclass(frozen=True)
class IndicatorConfig:
    """指标函数估计的采样参数"""

    r_start: float = RADIUS_START
    r_ratio: float = RADIUS_RATIO
    r_steps: int = RADIUS_STEPS
    n_theta: int = THETA_POINTS
    sine_slack: float = SINE_SLACK
    sinusoid_tol: float = SINUSOID_TOL
    phase_step: float = PHASE_STEP
    cancel_tol: float = CANCEL_TOL

    def radii(self) -> Tuple[float, ...]:
        return tuple(self.r_start * self.r_ratio ** k for k in range(self.r_steps))

    def as_dict(self) -> dict:
        return {
            "r_start": self.r_start,
            "r_ratio": self.r_ratio,
            "r_steps": self.r_steps,
            "n_theta": self.n_theta,
            "sine_slack": self.sine_slack,
            "sinusoid_tol": self.sinusoid_tol,
            "phase_step": self.phase_step,
            "cancel_tol": self.cancel_tol,
        }
