"""
复围道积分
复合 Gauss–Legendre 求积、闭合 cycle 路径与周期 𝒜、ℬ
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from common.errors import QuadratureError
from common.log import get_logger
from common.settings import tolerances
from .surface import branch_value

logger = get_logger("Curve")

GAUSS_ORDER = 32
MAX_PANELS = 2 ** 12
PERIOD_TOL = 1e-12

_NODES, _WEIGHTS = leggauss(GAUSS_ORDER)

A_CYCLE = "a-cycle"
B_CYCLE = "b-cycle"


def gauss_panels(f: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, panels: int) -> complex:
    """
    在 [t0, t1] 上等分 panels 段，每段 32 点 Gauss–Legendre

    f 按路径顺序接收全部节点（先按段，再按段内升序）
    """
    edges = np.linspace(t0, t1, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    return complex(np.sum(f(x) * w))


def adaptive_gauss(f: Callable[[np.ndarray], np.ndarray], t0: float, t1: float,
                   tol: float = PERIOD_TOL, start: int = 2, atol: float = 0.0) -> Tuple[complex, int]:
    """
    段数逐次加倍直到相邻两次结果之差 ≤ max(tol·|I|, atol)

    Returns:
        (积分值, 最终段数)

    Raises:
        QuadratureError: 达到 2^12 段仍未收敛
    """
    panels = start
    previous = gauss_panels(f, t0, t1, panels)
    while panels < MAX_PANELS:
        panels *= 2
        current = gauss_panels(f, t0, t1, panels)
        if not np.isfinite(current):
            raise QuadratureError("被积函数出现非有限值")
        if abs(current - previous) <= max(tol * abs(current), atol, 1e-300):
            return current, panels
        previous = current
    raise QuadratureError(f"段数达到上限 {MAX_PANELS} 仍未收敛")


@dataclass(frozen=True)
class CyclePath:
    """
    κ 平面上的椭圆闭路 κ(θ) = center + rx·cos θ + i·ry·sin θ，θ ∈ [0, 2π]

    逆时针；a-cycle 只包围 [-l₊, -l₋]，b-cycle 在两条割线中点穿过实轴，
    上半部在上叶、下半部在下叶
    """

    which: str
    center: float
    rx: float
    ry: float

    def point(self, theta: np.ndarray) -> np.ndarray:
        return self.center + self.rx * np.cos(theta) + 1j * self.ry * np.sin(theta)

    def tangent(self, theta: np.ndarray) -> np.ndarray:
        return -self.rx * np.sin(theta) + 1j * self.ry * np.cos(theta)

    def waypoints(self, n: int = 16) -> list:
        """闭路上的 n 个有序路标点"""
        return [complex(z) for z in self.point(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))]


def a_cycle(lminus: float, lplus: float, scale: float = 1.0) -> CyclePath:
    """
    包围左割线的 a-cycle

    scale 放大与割线的间距，scale ≤ 3 时不触及右割线
    """
    gap = 0.25 * min(lminus, lplus - lminus) * scale
    rx = 0.5 * (lplus - lminus) + gap
    return CyclePath(A_CYCLE, -0.5 * (lminus + lplus), rx, rx)


def b_cycle(lminus: float, lplus: float, scale: float = 1.0) -> CyclePath:
    """在两割线中点穿过实轴的 b-cycle，scale 只改变虚半轴"""
    rx = 0.5 * (lminus + lplus)
    return CyclePath(B_CYCLE, 0.0, rx, rx * scale)


def _tracked_inverse(kappa: np.ndarray, lminus: float, lplus: float, eps_branch: float) -> np.ndarray:
    """
    沿路径逐点选择 ±w 中与上一节点最接近者，返回 1/w

    起点取上叶
    """
    b = branch_value(kappa, lminus, lplus)
    if np.min(np.abs(b)) < eps_branch:
        raise QuadratureError("路径过于接近分支点", kind="sheet-tracking-failure")
    overlap = (b[1:] * np.conj(b[:-1])).real
    cosine = overlap / (np.abs(b[1:]) * np.abs(b[:-1]))
    if np.min(np.abs(cosine)) < 0.5:
        raise QuadratureError("相邻节点间 w 的叶无法判定", kind="sheet-tracking-failure")
    signs = np.concatenate(([1.0], np.cumprod(np.sign(overlap))))
    return 1.0 / (signs * b)


def _weight(weight, kappa: np.ndarray):
    return 1.0 if weight is None else weight(kappa)


def period(lminus: float, lplus: float, rho: complex, path: CyclePath,
           tol: float = PERIOD_TOL, eps_branch: Optional[float] = None,
           weight: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> complex:
    """
    ρ∮ g(κ) dκ/w 沿闭路积分（缺省 g = 1）

    Args:
        lminus, lplus: 分支点
        rho: λ = ρκ 的旋转因子
        path: 闭路
        tol: 相对收敛容差
        eps_branch: 节点到分支点的最小 |w|，缺省取全局 eps_branch
        weight: 权函数 g(κ)

    Returns:
        周期值（a-cycle 给出 𝒜，b-cycle 给出 ℬ）
    """
    eps_branch = tolerances.eps_branch if eps_branch is None else eps_branch
    if path.which == A_CYCLE:
        def integrand(theta):
            kappa = path.point(theta)
            return path.tangent(theta) * _weight(weight, kappa) / branch_value(kappa, lminus, lplus)
    else:
        def integrand(theta):
            kappa = path.point(theta)
            return path.tangent(theta) * _weight(weight, kappa) * _tracked_inverse(kappa, lminus, lplus, eps_branch)

    value, panels = adaptive_gauss(integrand, 0.0, 2.0 * math.pi, tol)
    logger.debug(f"{path.which} 求积收敛: {panels} 段")
    return rho * value
