"""
亏格 1 theta 函数
θ(z) = Σ exp(½Bn² + zn)，以及奇 Jacobi 函数 θ₁ 与其对数导数
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from common.errors import ModulusError, PoleError, ThetaOverflowError
from common.settings import tolerances

TWO_PI_I = 2j * math.pi
# exp 的安全指数上限
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class ThetaModulus:
    """周期矩阵元 B 及 τ = B / 2πi"""

    B: complex
    tau: complex = field(init=False)

    def __post_init__(self):
        B = complex(self.B)
        if not (B.real < 0.0) or not cmath.isfinite(B):
            raise ModulusError(f"周期 B 必须满足 Re B < 0 (即 Im τ > 0)，当前 B={B}")
        object.__setattr__(self, 'B', B)
        object.__setattr__(self, 'tau', B / TWO_PI_I)

    @classmethod
    def from_tau(cls, tau: complex) -> 'ThetaModulus':
        """由 τ 构造"""
        tau = complex(tau)
        if tau.imag <= 0.0:
            raise ModulusError(f"Im τ 必须为正，当前 τ={tau}")
        return cls(TWO_PI_I * tau)

    @cached_property
    def theta1_prime_zero(self) -> complex:
        """θ₁′(0)，用于极点判定的尺度"""
        return _theta1_series(0j, self.B, 1, tolerances.eps_theta)

    @cached_property
    def theta1_third_zero(self) -> complex:
        """θ₁‴(0)"""
        return _theta1_series(0j, self.B, 3, tolerances.eps_theta)


def _order(b_re: float, x: float, eps: float, power: int, offset: float) -> int:
    """
    选取截断阶 N，使 |ν| > N 的项相对中心项小于 eps

    Args:
        b_re: Re B (负数)
        x: 约化后 |Re z|
        eps: 截断容差
        power: 导数阶（项前因子 ν^power）
        offset: 0 对应 θ，½ 对应 θ₁
    """
    ref = 0.5 * b_re * offset * offset + x * offset
    target = ref + math.log(eps)
    n = 1
    while True:
        nu = n + offset
        if 0.5 * b_re * nu * nu + x * nu + power * math.log(nu + 1.0) < target:
            return n + 2
        n += 1


def _reduce(z: complex, B: complex) -> Tuple[complex, int, int]:
    """
    把 z 约化到基本区域：z = z0 + mB + 2πi r

    Returns:
        (z0, m, r)
    """
    m = int(round(z.real / B.real))
    z1 = z - m * B
    r = int(round(z1.imag / (2.0 * math.pi)))
    return z1 - TWO_PI_I * r, m, r


def _theta_series(z0: complex, B: complex, eps: float) -> complex:
    N = _order(B.real, abs(z0.real), eps, 0, 0.0)
    n = np.arange(-N, N + 1, dtype=float)
    return complex(np.sum(np.exp(0.5 * B * n * n + z0 * n)))


def _theta1_series(z0: complex, B: complex, k: int, eps: float) -> complex:
    """θ₁ 的 k 阶导数，逐项求导"""
    N = _order(B.real, abs(z0.real), eps, k, 0.5)
    n = np.arange(-N - 1, N + 1, dtype=float)
    nu = n + 0.5
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    terms = sign * nu ** k * np.exp(0.5 * B * nu * nu + nu * z0)
    return complex(np.sum(terms))


def _shift_factor(exponent: complex) -> complex:
    if exponent.real > _EXP_LIMIT:
        raise ThetaOverflowError(f"格点平移因子溢出 (Re 指数 = {exponent.real:.1f})")
    return cmath.exp(exponent)


def theta(z: complex, m: ThetaModulus, eps: Optional[float] = None) -> complex:
    """
    Riemann theta 函数 θ(z) = Σ exp(½Bn² + zn)

    Args:
        z: 复自变量
        m: 模参数
        eps: 尾项截断容差，缺省取全局 eps_theta

    Returns:
        θ(z)
    """
    z = complex(z)
    eps = tolerances.eps_theta if eps is None else eps
    z0, shift, _ = _reduce(z, m.B)
    # θ(z0 + mB) = exp(-½Bm² - z0 m) θ(z0)
    factor = _shift_factor(-0.5 * m.B * shift * shift - z0 * shift)
    return factor * _theta_series(z0, m.B, eps)


def theta1_derivative(z: complex, m: ThetaModulus, k: int = 0, eps: Optional[float] = None) -> complex:
    """
    θ₁ 的 k 阶导数

    θ₁(z) = Σ (-1)^n exp(½B(n+½)² + (n+½)z)，满足
    θ(z + πi + B/2) = exp(-B/8 - z/2) θ₁(z)

    Args:
        z: 复自变量
        m: 模参数
        k: 导数阶
        eps: 截断容差

    Returns:
        θ₁^(k)(z)
    """
    z = complex(z)
    eps = tolerances.eps_theta if eps is None else eps
    z0, shift, turns = _reduce(z, m.B)
    # θ₁(z) = (-1)^(m+r) exp(-mz + Bm²/2) θ₁(z0)，按 Leibniz 展开导数
    factor = _shift_factor(-shift * (z - TWO_PI_I * turns) + 0.5 * m.B * shift * shift)
    sign = -1.0 if (shift + turns) % 2 else 1.0
    total = 0j
    for j in range(k + 1):
        total += math.comb(k, j) * (-shift) ** (k - j) * _theta1_series(z0, m.B, j, eps)
    return sign * factor * total


def theta1(z: complex, m: ThetaModulus, eps: Optional[float] = None) -> complex:
    """奇 Jacobi theta 函数 θ₁(z)"""
    return theta1_derivative(z, m, 0, eps)


def theta1_dlog(z: complex, m: ThetaModulus, order: int = 1, eps: Optional[float] = None,
                eps_pole: Optional[float] = None) -> complex:
    """
    log θ₁ 的导数

    Args:
        z: 复自变量
        m: 模参数
        order: 1 返回 θ₁′/θ₁，2 返回 (log θ₁)″，3 返回 (log θ₁)‴
        eps: 截断容差
        eps_pole: 极点判定阈值，缺省取全局 eps_pole

    Returns:
        对数导数值

    Raises:
        PoleError: z 位于 θ₁ 零点（格点）附近
    """
    if order not in (1, 2, 3):
        raise ValueError(f"不支持的导数阶: {order}")
    z = complex(z)
    eps = tolerances.eps_theta if eps is None else eps
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    z0, shift, _ = _reduce(z, m.B)
    t0 = _theta1_series(z0, m.B, 0, eps)
    if abs(t0) < eps_pole * abs(m.theta1_prime_zero):
        raise PoleError(f"θ₁ 在 z={z} 处为零（格点）")
    d1 = _theta1_series(z0, m.B, 1, eps) / t0
    if order == 1:
        # θ₁′/θ₁ 在 z → z + B 时减 1
        return d1 - shift
    r2 = _theta1_series(z0, m.B, 2, eps) / t0
    if order == 2:
        return r2 - d1 * d1
    r3 = _theta1_series(z0, m.B, 3, eps) / t0
    return r3 - 3.0 * d1 * r2 + 2.0 * d1 ** 3
