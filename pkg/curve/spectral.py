"""
谱曲线数据
分支点、周期 𝒜/ℬ、模参数 τ、归一化因子 α 与速度常数 V
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from common.errors import ModulusError, PoleError
from common.log import get_logger
from special import ThetaModulus
from .periods import a_cycle, b_cycle, period
from .surface import (
    COMPACT, VARIANTS, SurfacePoint, branch_points, branch_value, variant_rho,
)

logger = get_logger("Curve")

FAULT_PERTURB_ACAL = "perturb-acal"
FAULTS = (FAULT_PERTURB_ACAL,)
_FAULT_SCALE = 1e-6


@dataclass(frozen=True)
class CurveData:
    """
    SO(2) 陀螺的椭圆谱曲线

    周期按 κ = λ/ρ 平面上的 cycle 计算：𝒜 = ρ∮_a dκ/w，ℬ = ρ∮_b dκ/w；
    α = 2πi/𝒜，B = αℬ = 2πiτ，V = 2aα
    """

    variant: str
    a: float
    E: float
    rho: complex
    lminus: float
    lplus: float
    Acal: complex
    Bcal: complex
    tau: complex
    alpha: complex
    B: complex
    V: complex
    b_flipped: bool = False
    fault: Optional[str] = None

    @cached_property
    def modulus(self) -> ThetaModulus:
        return ThetaModulus(self.B)

    @property
    def ksq(self) -> float:
        """椭圆模 k² = 2a²/(E + a²)"""
        return 2.0 * self.a * self.a / (self.E + self.a * self.a)

    @property
    def omega_tilde(self) -> float:
        """ω̃ = √(2(E + a²))"""
        return math.sqrt(2.0 * (self.E + self.a * self.a))

    def to_dict(self) -> dict:
        def pair(z):
            return [complex(z).real, complex(z).imag]

        return {
            'variant': self.variant,
            'a': self.a,
            'E': self.E,
            'lminus': self.lminus,
            'lplus': self.lplus,
            'Acal': pair(self.Acal),
            'Bcal': pair(self.Bcal),
            'tau': pair(self.tau),
            'alpha': pair(self.alpha),
            'V': pair(self.V),
            'b_flipped': self.b_flipped,
            'im_tau_positive': self.tau.imag > 0.0,
        }


def build_curve(a: float, E: float, variant: str = COMPACT, fault: Optional[str] = None,
                contour_scale: float = 1.0) -> CurveData:
    """
    构造谱曲线并计算周期

    Args:
        a: 耦合常数
        E: 能量
        variant: "compact" 或 "noncompact"
        fault: 故障注入（"perturb-acal" 把 𝒜 乘以 1 + 1e-6）
        contour_scale: cycle 路径的放缩系数

    Returns:
        CurveData

    Raises:
        RegimeError: E ≤ a²
        ModulusError: Im τ ≤ 0
        QuadratureError: 周期积分不收敛
    """
    if variant not in VARIANTS:
        raise ValueError(f"未知情形: {variant}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"未知故障类型: {fault}")

    lminus, lplus = branch_points(a, E)
    rho = variant_rho(variant)
    Acal = period(lminus, lplus, rho, a_cycle(lminus, lplus, contour_scale))
    Bcal = period(lminus, lplus, rho, b_cycle(lminus, lplus, contour_scale))

    flipped = (Bcal / Acal).imag < 0.0
    if flipped:
        Bcal = -Bcal
        logger.info("b-cycle 反向以保证 Im τ > 0")

    if fault == FAULT_PERTURB_ACAL:
        Acal = Acal * (1.0 + _FAULT_SCALE)
        logger.warning("故障注入: 𝒜 已扰动")

    tau = Bcal / Acal
    if not tau.imag > 0.0:
        raise ModulusError(f"Im τ ≤ 0: τ={tau}")

    alpha = 2j * math.pi / Acal
    curve = CurveData(
        variant=variant, a=float(a), E=float(E), rho=rho,
        lminus=lminus, lplus=lplus,
        Acal=Acal, Bcal=Bcal, tau=tau,
        alpha=alpha, B=alpha * Bcal, V=2.0 * a * alpha,
        b_flipped=flipped, fault=fault,
    )
    logger.info(f"曲线构造完成: l±=({lminus:.10g}, {lplus:.10g}), τ={tau:.10g}")
    return curve


def w(p: SurfacePoint, c: CurveData) -> complex:
    """
    w(p)，满足 w² = κ⁴ - (2E/a²)κ² + 1

    Raises:
        PoleError: p 在 ∞
    """
    if p.is_infinite:
        raise PoleError("w 在 ∞ 处有极点", kind="pole-at-marked-point")
    return p.sheet * branch_value(p.kappa(c.rho), c.lminus, c.lplus)


def mu(p: SurfacePoint, c: CurveData) -> complex:
    """
    μ(p) = a·w(p)/λ

    紧情形 μ² = a²λ² - 2E + a²λ⁻²，非紧情形 μ² = a²λ² + 2E + a²λ⁻²

    Raises:
        PoleError: λ ∈ {0, ∞}
    """
    if p.is_infinite or p.is_zero:
        raise PoleError(f"μ 在标记点 {p.marked or p.lam} 处有极点", kind="pole-at-marked-point")
    return c.a * w(p, c) / p.lam


def mu_pair(lam: complex, c: CurveData) -> np.ndarray:
    """λ 上方两点 (sheet +, sheet -) 的 μ 值"""
    value = mu(SurfacePoint(lam, 1), c)
    return np.array([value, -value])


def lattice_reduce(z: complex, c: CurveData) -> complex:
    """把 z 约化到格 (2πi, B) 的原点附近代表元"""
    B = c.B
    best = None
    m0 = round(z.real / B.real)
    for m in (m0 - 1, m0, m0 + 1):
        z1 = z - m * B
        r0 = round(z1.imag / (2.0 * math.pi))
        for r in (r0 - 1, r0, r0 + 1):
            cand = z1 - 2j * math.pi * r
            if best is None or abs(cand) < abs(best):
                best = cand
    return best


def lattice_equal(z1: complex, z2: complex, c: CurveData, tol: float = 1e-8) -> bool:
    """z1 ≡ z2 mod (2πi, B)"""
    return abs(lattice_reduce(z1 - z2, c)) < tol * max(1.0, abs(c.B))


def lattice_coordinates(z: complex, c: CurveData):
    """z = x·2πi + y·B 的实坐标 (x, y)"""
    basis = np.array([[0.0, c.B.real], [2.0 * math.pi, c.B.imag]])
    x, y = np.linalg.solve(basis, np.array([z.real, z.imag]))
    return float(x), float(y)
