"""
Abel 映射
A(p) = α∫_{p₀}^{p} dλ/w，基点 p₀ = l₋（分支点）

标准路径：先竖直离开 l₋ 到 κ₁ = l₋ + iσδ，再直线到目标点；
σ 取目标点虚部的符号（实轴上取 +1），全程不穿过割线。
∞ 点经 κ_R = iσ·2l₊ 后换用 ζ = 1/κ 积分到 ζ = 0。
"""

import math
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from common.errors import QuadratureError
from common.log import get_logger
from common.settings import tolerances
from .periods import adaptive_gauss
from .spectral import CurveData, lattice_reduce
from .surface import SurfacePoint, branch_value, infinity_point, zero_point

logger = get_logger("Curve")

ABEL_TOL = 1e-12
ABEL_ATOL = 1e-14

Weight = Optional[Callable[[np.ndarray], np.ndarray]]


def _apply(weight: Weight, kappa: np.ndarray):
    return 1.0 if weight is None else weight(kappa)


def _leg_gap(lminus: float, lplus: float) -> float:
    return 0.25 * min(lminus, lplus - lminus)


def _integrate(f, tol: float) -> complex:
    # 被积函数在端点光滑，两段起步即可
    value, _ = adaptive_gauss(f, 0.0, 1.0, tol, atol=ABEL_ATOL)
    return value


def path_integral(kappa: Optional[complex], lminus: float, lplus: float,
                  weight: Weight = None, sigma: Optional[int] = None,
                  tol: float = ABEL_TOL) -> complex:
    """
    上叶上 ∫_{l₋}^{κ} g(κ) dκ/w 沿标准路径积分（κ = None 表示 ∞）

    Args:
        kappa: 目标点 κ 坐标
        lminus, lplus: 分支点
        weight: 权函数 g(κ)，在 ∞ 附近须有界
        sigma: 指定走上半平面 (+1) 或下半平面 (-1)，缺省由目标点决定
        tol: 相对收敛容差

    Returns:
        积分值（乘以叶号 s 即得 s 叶上的值）

    Raises:
        QuadratureError: 目标点与分支点重合或积分不收敛
    """
    if kappa is not None:
        kappa = complex(kappa)
        eps_branch = tolerances.eps_branch
        if abs(kappa - lminus) < eps_branch:
            return 0j
        for e in (lplus, -lplus, -lminus):
            if abs(kappa - e) < eps_branch:
                raise QuadratureError(f"目标点 κ={kappa} 与分支点 {e} 重合", kind="branch-point-collision")
    if sigma is None:
        sigma = -1 if (kappa is not None and kappa.imag < 0.0) else 1

    gap = _leg_gap(lminus, lplus)
    d = 1j * sigma * gap
    kappa1 = lminus + d

    # 第一段 κ = l₋ + d·v²，w = κ²·√((κ-l₊)(κ+l₊)/κ²)·v·√(d(κ+l₋)/κ²)，
    # v 从根号中精确提出，2dv/w 在 v → 0 处有限
    def first_leg(v):
        k = lminus + d * v * v
        inv = 1.0 / (k * k)
        reduced = k * k * np.sqrt((k - lplus) * (k + lplus) * inv) * np.sqrt(d * (k + lminus) * inv)
        return 2.0 * d * _apply(weight, k) / reduced

    total = _integrate(first_leg, tol)

    far = kappa is None or abs(kappa) > 2.0 * lplus
    end = 2j * sigma * lplus if far else kappa
    delta = end - kappa1
    if abs(delta) > 0.0:
        def second_leg(t):
            k = kappa1 + t * delta
            return delta * _apply(weight, k) / branch_value(k, lminus, lplus)

        total += _integrate(second_leg, tol)

    if far:
        zeta_r = 1.0 / end
        zeta_p = 0j if kappa is None else 1.0 / kappa
        span = zeta_p - zeta_r

        # |ζ| ≤ 1/(2l₊) 内无割线，dκ/w = -dζ/ŵ(ζ)
        def tail(t):
            z = zeta_r + t * span
            w_hat = np.sqrt(1.0 - lplus * lplus * z * z) * np.sqrt(1.0 - lminus * lminus * z * z)
            return -span * _apply(weight, 1.0 / z) / w_hat

        total += _integrate(tail, tol)
    return total


def abel(p: SurfacePoint, c: CurveData, sigma: Optional[int] = None) -> complex:
    """
    Abel 映射 A(p) = α·ρ·s·∫_{l₋}^{κ} dκ/w

    满足 A(p₀) = 0，A(p*) = -A(p)（p* 为对合像）

    Args:
        p: 曲线上的点
        c: 曲线数据
        sigma: 强制路径走上 (+1) 或下 (-1) 半平面

    Returns:
        A(p) 在 ℂ 中的代表元
    """
    kappa = None if p.is_infinite else p.kappa(c.rho)
    raw = path_integral(kappa, c.lminus, c.lplus, sigma=sigma)
    return c.alpha * c.rho * p.sheet * raw


@lru_cache(maxsize=64)
def marked_images(c: CurveData) -> Tuple[complex, complex, complex]:
    """
    标记点的 Abel 像

    Returns:
        (A(0⁺), A(P₁), A(P₂))，A(0⁻) = -A(0⁺)
    """
    z_plus = abel(zero_point(+1), c)
    a_p1 = abel(infinity_point(1, c.rho), c)
    a_p2 = abel(infinity_point(2, c.rho), c)
    logger.debug(f"A(0⁺)={z_plus:.12g}, A(P₁)={a_p1:.12g}, A(P₂)={a_p2:.12g}")
    return z_plus, a_p1, a_p2


def _crosses_cut(k0: complex, k1: complex, lminus: float, lplus: float) -> bool:
    """线段 k0→k1 是否穿过实轴上的割线"""
    if (k0.imag > 0.0) == (k1.imag > 0.0) or k0.imag == k1.imag:
        return False
    t = k0.imag / (k0.imag - k1.imag)
    x = abs(k0.real + t * (k1.real - k0.real))
    return lminus < x < lplus


def abel_invert(target: complex, c: CurveData, tol: float = 1e-11,
                max_iter: int = 60) -> SurfacePoint:
    """
    Abel 映射求逆：找 p 使 A(p) ≡ target mod (2πi, B)

    先在 κ 平面网格上选初值，再以 dA/dκ = αρ/w 做 Newton 迭代；
    步长穿过割线时换叶

    Args:
        target: 目标 Abel 像
        c: 曲线数据
        tol: |A(p) - target| 的收敛容差（模格）
        max_iter: 最大迭代次数

    Returns:
        SurfacePoint

    Raises:
        QuadratureError: Newton 迭代不收敛
    """
    z_plus, a_p1, a_p2 = marked_images(c)
    known = [
        (z_plus, zero_point(+1)), (-z_plus, zero_point(-1)),
        (a_p1, infinity_point(1, c.rho)), (a_p2, infinity_point(2, c.rho)),
    ]
    for image, point in known:
        if abs(lattice_reduce(image - target, c)) < tol:
            return point

    radii = np.geomspace(0.3 * c.lminus, 3.0 * c.lplus, 8)
    angles = (np.arange(12) + 0.5) * (2.0 * math.pi / 12)
    best = None
    for r in radii:
        for ang in angles:
            k = r * complex(math.cos(ang), math.sin(ang))
            for sheet in (1, -1):
                p = SurfacePoint(k * c.rho, sheet)
                err = abs(lattice_reduce(abel(p, c) - target, c))
                if best is None or err < best[0]:
                    best = (err, k, sheet)

    _, kappa, sheet = best
    for _ in range(max_iter):
        p = SurfacePoint(kappa * c.rho, sheet)
        residual = lattice_reduce(abel(p, c) - target, c)
        if abs(residual) < tol:
            return p
        slope = c.alpha * c.rho / (sheet * branch_value(kappa, c.lminus, c.lplus))
        step = residual / slope
        # 限制步长，避免跳过分支点
        limit = 0.5 * max(abs(kappa), c.lminus)
        if abs(step) > limit:
            step *= limit / abs(step)
        new_kappa = kappa - step
        if _crosses_cut(kappa, new_kappa, c.lminus, c.lplus):
            sheet = -sheet
        kappa = new_kappa
        if abs(kappa) > 1e8:
            break
    raise QuadratureError(f"Abel 逆映射不收敛: target={target}", kind="quadrature-nonconvergence")
