"""
谱曲线上的点与分支函数
w² = κ⁴ - (2E/a²)κ² + 1，λ = ρκ（紧情形 ρ = 1，非紧情形 ρ = i）
割线取实轴上的 [-l₊, -l₋] 与 [l₋, l₊]
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from common.errors import PoleError, RegimeError

ArrayLike = Union[complex, np.ndarray]

COMPACT = "compact"
NONCOMPACT = "noncompact"
VARIANTS = (COMPACT, NONCOMPACT)

ZERO_PLUS = "0+"
ZERO_MINUS = "0-"
INF_PLUS = "inf+"
INF_MINUS = "inf-"

# 恰在割线上的实点取上岸极限
_UPPER_SHIFT = 1e-200


def variant_rho(variant: str) -> complex:
    """λ = ρκ 的旋转因子"""
    if variant == COMPACT:
        return 1.0 + 0j
    if variant == NONCOMPACT:
        return 1j
    raise ValueError(f"未知情形: {variant}")


@dataclass(frozen=True)
class SurfacePoint:
    """
    双叶椭圆曲线上的点

    lam 为 None 表示 λ = ∞；sheet = ±1 为 w 的符号约定，
    marked 标记 0±、∞± 四个特殊点
    """

    lam: Optional[complex]
    sheet: int = 1
    marked: Optional[str] = None

    def __post_init__(self):
        if self.sheet not in (1, -1):
            raise ValueError(f"sheet 必须为 ±1，当前 {self.sheet}")
        if self.lam is not None:
            object.__setattr__(self, 'lam', complex(self.lam))

    @property
    def is_infinite(self) -> bool:
        return self.lam is None

    @property
    def is_zero(self) -> bool:
        return self.lam is not None and self.lam == 0

    def kappa(self, rho: complex) -> complex:
        """κ = λ/ρ"""
        if self.lam is None:
            raise PoleError("∞ 点没有有限 κ 坐标", kind="pole-at-marked-point")
        return self.lam / rho

    def involution(self) -> 'SurfacePoint':
        """超椭圆对合：同一 λ，另一叶"""
        swap = {ZERO_PLUS: ZERO_MINUS, ZERO_MINUS: ZERO_PLUS,
                INF_PLUS: INF_MINUS, INF_MINUS: INF_PLUS}
        return SurfacePoint(self.lam, -self.sheet, swap.get(self.marked))

    def to_dict(self) -> dict:
        lam = None if self.lam is None else [self.lam.real, self.lam.imag]
        return {'lambda': lam, 'sheet': self.sheet, 'marked': self.marked}


def zero_point(sign: int) -> SurfacePoint:
    """
    0± 点，按 λμ → ±a 区分

    上叶分支在 κ = 0 处 w = -1，因此 0⁺ 位于 sheet = -1
    """
    return SurfacePoint(0j, -sign, ZERO_PLUS if sign > 0 else ZERO_MINUS)


def infinity_point(j: int, rho: complex) -> SurfacePoint:
    """
    P₁ (∞⁺, μ ≈ +aλ) 与 P₂ (∞⁻)

    ∞ 处 w ≈ sheet·κ²，μ ≈ sheet·aλ/ρ²，故 P₁ 位于 sheet = ρ²
    """
    base = int(round((rho * rho).real))
    if j == 1:
        return SurfacePoint(None, base, INF_PLUS)
    if j == 2:
        return SurfacePoint(None, -base, INF_MINUS)
    raise ValueError(f"j 必须为 1 或 2，当前 {j}")


def branch_points(a: float, E: float):
    """
    分支点 l±，l±² = (E ± √(E² - a⁴)) / a²

    Args:
        a: 耦合常数 (> 0)
        E: 能量

    Returns:
        (lminus, lplus)，0 < l₋ < 1 < l₊，l₊l₋ = 1

    Raises:
        RegimeError: E ≤ a²（非转动区）
    """
    if not a > 0.0:
        raise RegimeError(f"耦合常数必须为正，当前 a={a}")
    if not E > a * a:
        raise RegimeError(f"theta 管线要求 E > a²（转动区），当前 E={E}, a²={a * a}")
    root = math.sqrt(E * E - a ** 4)
    lplus = math.sqrt((E + root) / (a * a))
    # 用 l₊l₋ = 1 求小根，避免相消
    lminus = 1.0 / lplus
    return lminus, lplus


def branch_value(kappa: ArrayLike, lminus: float, lplus: float) -> ArrayLike:
    """
    上叶分支 w(κ) = κ²·√(1 - l₊²/κ²)·√(1 - l₋²/κ²)

    割线外解析，κ → ∞ 时 w ≈ +κ²，κ = 0 处 w = -1；
    恰在实轴上的点取上岸极限
    """
    k = np.asarray(kappa, dtype=complex)
    on_axis = k.imag == 0.0
    shift = _UPPER_SHIFT * np.maximum(1.0, np.abs(k))
    k = np.where(on_axis, k + 1j * shift, k)
    tiny = np.abs(k) < 1e-100
    safe = np.where(tiny, 1.0, k)
    inv = 1.0 / (safe * safe)
    # 1 - l²/κ² 按 (κ - l)(κ + l)/κ² 计算，分支不变，分支点附近无相消
    w = (safe * safe * np.sqrt((safe - lplus) * (safe + lplus) * inv)
         * np.sqrt((safe - lminus) * (safe + lminus) * inv))
    w = np.where(tiny, -lplus * lminus + 0j, w)
    return complex(w) if w.ndim == 0 else w


def quartic(kappa: ArrayLike, a: float, E: float) -> ArrayLike:
    """κ⁴ - (2E/a²)κ² + 1"""
    k = np.asarray(kappa, dtype=complex)
    value = k ** 4 - (2.0 * E / (a * a)) * k ** 2 + 1.0
    return complex(value) if value.ndim == 0 else value
