"""
Weierstrass ℘ 函数
通过 θ₁ 的二阶对数导数求值，附行求和格点级数作为独立校验
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from common.errors import ModulusError, PoleError
from common.settings import tolerances
from .theta import ThetaModulus, theta1_dlog


def _reduce_basis(w1: complex, w2: complex) -> Tuple[complex, complex]:
    """Lagrange–Gauss 约化，返回 |w1| ≤ |w2| 且 Im(w2/w1) > 0 的基"""
    if abs(w2) < abs(w1):
        w1, w2 = w2, w1
    for _ in range(64):
        q = round((w2 / w1).real)
        w2 = w2 - q * w1
        if abs(w2) < abs(w1):
            w1, w2 = w2, w1
            continue
        break
    if (w2 / w1).imag < 0.0:
        w2 = -w2
    return w1, w2


@dataclass(frozen=True)
class WeierstrassLattice:
    """
    半周期对 (ω₁, ω₂)，格为 2ω₁ℤ + 2ω₂ℤ

    构造时保证 Im(ω₂/ω₁) > 0，并缓存约化基、theta 模参数与不变量 g₂, g₃
    """

    omega1: complex
    omega2: complex
    g2: complex = field(init=False)
    g3: complex = field(init=False)

    def __post_init__(self):
        w1, w2 = complex(self.omega1), complex(self.omega2)
        if w1 == 0 or w2 == 0:
            raise ModulusError("半周期不能为零")
        ratio = w2 / w1
        if abs(ratio.imag) < 1e-14 * abs(ratio):
            raise ModulusError(f"半周期共线，不构成格: ω₁={w1}, ω₂={w2}")
        if ratio.imag < 0.0:
            w2 = -w2
        object.__setattr__(self, 'omega1', w1)
        object.__setattr__(self, 'omega2', w2)
        g2, g3 = self._invariants()
        object.__setattr__(self, 'g2', g2)
        object.__setattr__(self, 'g3', g3)

    @classmethod
    def from_periods(cls, period1: complex, period2: complex) -> 'WeierstrassLattice':
        """由全周期构造"""
        return cls(0.5 * complex(period1), 0.5 * complex(period2))

    @cached_property
    def basis(self) -> Tuple[complex, complex]:
        """约化后的全周期 (W₁, W₂)"""
        return _reduce_basis(2.0 * self.omega1, 2.0 * self.omega2)

    @cached_property
    def modulus(self) -> ThetaModulus:
        W1, W2 = self.basis
        return ThetaModulus.from_tau(W2 / W1)

    @cached_property
    def scale(self) -> complex:
        """dz/du = 2πi / W₁，把 ℘ 的格映到 theta 格 (2πi, B)"""
        return 2j * math.pi / self.basis[0]

    @cached_property
    def constant(self) -> complex:
        """由 ℘ = u⁻² + O(u²) 确定的加性常数"""
        m = self.modulus
        return self.scale ** 2 * m.theta1_third_zero / (3.0 * m.theta1_prime_zero)

    def _invariants(self) -> Tuple[complex, complex]:
        W1, W2 = _reduce_basis(2.0 * self.omega1, 2.0 * self.omega2)
        q = cmath.exp(2j * math.pi * W2 / W1)
        n = np.arange(1, 200, dtype=float)
        qn = q ** n
        keep = np.abs(qn) > 1e-300
        n, qn = n[keep], qn[keep]
        e4 = 1.0 + 240.0 * np.sum(n ** 3 * qn / (1.0 - qn))
        e6 = 1.0 - 504.0 * np.sum(n ** 5 * qn / (1.0 - qn))
        g2 = (4.0 * math.pi ** 4 / 3.0) * e4 / W1 ** 4
        g3 = (8.0 * math.pi ** 6 / 27.0) * e6 / W1 ** 6
        return complex(g2), complex(g3)

    def lattice_distance(self, u: complex) -> float:
        """u 到最近格点的距离"""
        W1, W2 = self.basis
        # 实坐标 u = x W1 + y W2
        det = (W1.conjugate() * W2).imag
        x = (u.conjugate() * W2).imag / det
        y = (W1.conjugate() * u).imag / det
        best = math.inf
        for i in (math.floor(x), math.ceil(x)):
            for j in (math.floor(y), math.ceil(y)):
                best = min(best, abs(u - i * W1 - j * W2))
        return best


def wp(u: complex, lat: WeierstrassLattice, eps_pole: Optional[float] = None) -> complex:
    """
    Weierstrass ℘(u | ω₁, ω₂) = -s² (log θ₁)″(su) + c，s = 2πi/W₁

    Args:
        u: 自变量（不在格点上）
        lat: 格
        eps_pole: 极点判定距离，缺省取全局 eps_pole

    Returns:
        ℘(u)

    Raises:
        PoleError: u 距格点小于 eps_pole
    """
    u = complex(u)
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    if lat.lattice_distance(u) < eps_pole:
        raise PoleError(f"u={u} 位于 ℘ 的极点")
    s = lat.scale
    return -s * s * theta1_dlog(s * u, lat.modulus, 2) + lat.constant


def wp_prime(u: complex, lat: WeierstrassLattice, eps_pole: Optional[float] = None) -> complex:
    """℘′(u) = -s³ (log θ₁)‴(su)"""
    u = complex(u)
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    if lat.lattice_distance(u) < eps_pole:
        raise PoleError(f"u={u} 位于 ℘′ 的极点")
    s = lat.scale
    return -s ** 3 * theta1_dlog(s * u, lat.modulus, 3)


def wp_lattice_sum(u: complex, lat: WeierstrassLattice, tol: float = 1e-17) -> complex:
    """
    格点级数 Σ′[(u-w)⁻² - w⁻²] + u⁻²，按行精确求和

    每一行 Σ_m (x - mW₁)⁻² = (π/W₁)² csc²(πx/W₁) 是闭式，
    行间贡献按 exp(-2π|Im(nW₂/W₁)|) 衰减，截断到 tol 以下

    Args:
        u: 自变量
        lat: 格
        tol: 行截断容差

    Returns:
        ℘(u) 的独立估计
    """
    u = complex(u)
    W1, W2 = lat.basis
    k = math.pi / W1

    def row(x: complex) -> complex:
        return k * k / cmath.sin(k * x) ** 2

    total = row(u) - k * k / 3.0
    n = 1
    while True:
        d = row(u - n * W2) - row(n * W2) + row(u + n * W2) - row(-n * W2)
        total += d
        if abs(d) < tol * max(1.0, abs(total)) and n > 2:
            break
        n += 1
        if n > 10000:
            break
    return total
