"""
转子状态
紧情形 H = ½l² - a²cos2φ，非紧情形（φ → iq）2E = q̇² - 2a²cosh2q
"""

import math
from dataclasses import dataclass, replace

from common.errors import RegimeError
from curve.surface import COMPACT, NONCOMPACT, VARIANTS
from special import elliptic_K


@dataclass(frozen=True)
class RotatorState:
    """
    相空间点

    angle 为 φ（紧）或 q（非紧）；momentum 为 l = φ̇ 或实数 q̇，
    非紧情形 Lax 矩阵中的 l = iq̇ 在组装时处理
    """

    variant: str
    a: float
    angle: float
    momentum: float
    t: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"未知情形: {self.variant}")
        if not self.a >= 0.0:
            raise ValueError(f"耦合常数不能为负: a={self.a}")

    @property
    def energy(self) -> float:
        if self.variant == COMPACT:
            return 0.5 * self.momentum ** 2 - self.a ** 2 * math.cos(2.0 * self.angle)
        return 0.5 * self.momentum ** 2 - self.a ** 2 * math.cosh(2.0 * self.angle)

    def advanced(self, angle: float, momentum: float, t: float) -> 'RotatorState':
        return replace(self, angle=angle, momentum=momentum, t=t)

    def to_dict(self) -> dict:
        return {
            'variant': self.variant,
            'a': self.a,
            'angle': self.angle,
            'momentum': self.momentum,
            't': self.t,
        }

    @classmethod
    def from_energy(cls, variant: str, a: float, E: float, angle: float = 0.0) -> 'RotatorState':
        """
        由能量构造初态，动量取正根

        Raises:
            RegimeError: 给定角度处动能为负
        """
        potential = a * a * (math.cos(2.0 * angle) if variant == COMPACT else math.cosh(2.0 * angle))
        kinetic = 2.0 * (E + potential)
        if kinetic < 0.0:
            raise RegimeError(f"能量 E={E} 在角度 {angle} 处不可达")
        return cls(variant, float(a), float(angle), math.sqrt(kinetic))


def omega_tilde(a: float, E: float) -> float:
    """ω̃ = √(2(E + a²))"""
    return math.sqrt(2.0 * (E + a * a))


def modulus_ksq(a: float, E: float) -> float:
    """k² = 2a²/(E + a²)"""
    return 2.0 * a * a / (E + a * a)


def rotation_period(a: float, E: float) -> float:
    """
    紧情形转动周期（φ 增加 π，sin²φ 的周期）T = 2K(k)/ω̃

    Raises:
        RegimeError: E ≤ a² 时不是转动
    """
    if not E > a * a:
        raise RegimeError(f"E={E} 不在转动区")
    return 2.0 * elliptic_K(modulus_ksq(a, E)) / omega_tilde(a, E)

