"""
Jacobi 椭圆函数与椭圆积分
sn/cn/dn 采用降序 Landen (AGM) 递推，K 采用 AGM，F 采用 Carlson 对称型
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import integrate

from common.errors import ModulusError, QuadratureError

ArrayLike = Union[float, np.ndarray]

_AGM_TOL = 1e-16
_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class EllipticModulus:
    """椭圆模 k²（实数）"""

    ksq: float

    def __post_init__(self):
        ksq = complex(self.ksq)
        if abs(ksq.imag) > 1e-14 * max(1.0, abs(ksq)):
            raise ModulusError(f"仅支持实 k²，当前 {ksq}")
        if not math.isfinite(ksq.real):
            raise ModulusError(f"k² 不是有限数: {ksq}")
        object.__setattr__(self, 'ksq', float(ksq.real))

    @property
    def k(self) -> float:
        return math.sqrt(self.ksq)

    @property
    def kprime(self) -> float:
        return math.sqrt(1.0 - self.ksq)

    def require_unit_interval(self, allow_zero: bool = False) -> None:
        """检查 0 < k² < 1（allow_zero 时放宽到 0 ≤ k²）"""
        low_ok = self.ksq >= 0.0 if allow_zero else self.ksq > 0.0
        if not (low_ok and self.ksq < 1.0):
            raise ModulusError(f"k² 超出 (0, 1): {self.ksq}", kind="modulus-out-of-range")


def _as_modulus(k) -> EllipticModulus:
    return k if isinstance(k, EllipticModulus) else EllipticModulus(k)


def agm(x: float, y: float) -> float:
    """算术几何平均"""
    for _ in range(64):
        if abs(x - y) <= 4.0 * _AGM_TOL * abs(x):
            break
        x, y = 0.5 * (x + y), math.sqrt(x * y)
    return 0.5 * (x + y)


def elliptic_K(k) -> float:
    """
    第一类完全椭圆积分 K(k) = π / (2·AGM(1, k′))

    Args:
        k: EllipticModulus 或 k² 数值

    Returns:
        K(k)

    Raises:
        ModulusError: k² 不在 [0, 1)
    """
    mod = _as_modulus(k)
    mod.require_unit_interval(allow_zero=True)
    return math.pi / (2.0 * agm(1.0, mod.kprime))


def jacobi_sncndn(u: ArrayLike, k) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    Jacobi 椭圆函数 (sn, cn, dn)，降序 Landen 变换

    Args:
        u: 实自变量（标量或数组）
        k: EllipticModulus 或 k²

    Returns:
        (sn, cn, dn)
    """
    mod = _as_modulus(k)
    mod.require_unit_interval(allow_zero=True)
    u = np.asarray(u, dtype=float)

    if mod.ksq == 0.0:
        return _unwrap(np.sin(u)), _unwrap(np.cos(u)), _unwrap(np.ones_like(u))

    a, b, c = 1.0, mod.kprime, mod.k
    a_list, c_list = [a], [c]
    while abs(c) > _AGM_TOL:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_list.append(a)
        c_list.append(c)
        if len(a_list) > 64:
            break

    n = len(a_list) - 1
    phi = (2.0 ** n) * a_list[n] * u
    phi_next = phi
    for i in range(n, 0, -1):
        phi_next = phi
        phi = 0.5 * (phi + np.arcsin(c_list[i] * np.sin(phi) / a_list[i]))

    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = cn / np.cos(phi_next - phi) if n > 0 else np.sqrt(1.0 - mod.ksq * sn * sn)
    return _unwrap(sn), _unwrap(cn), _unwrap(dn)


def _unwrap(x: np.ndarray) -> ArrayLike:
    return float(x) if np.ndim(x) == 0 else x


def jacobi_sn(u: ArrayLike, k) -> ArrayLike:
    """sn(u, k)，0 < k² < 1"""
    _as_modulus(k).require_unit_interval()
    return jacobi_sncndn(u, k)[0]


def _carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson 对称积分 R_F，复制定理迭代"""
    for _ in range(100):
        mean = (x + y + z) / 3.0
        dx, dy, dz = 1.0 - x / mean, 1.0 - y / mean, 1.0 - z / mean
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            e2 = dx * dy - dz * dz
            e3 = dx * dy * dz
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(mean)
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    raise QuadratureError("Carlson R_F 迭代不收敛")


def elliptic_F(phi: float, k) -> float:
    """
    第一类不完全椭圆积分 F(φ, k) = ∫₀^φ dθ / √(1 - k² sin²θ)

    对 |φ| > π/2 利用 F(φ + nπ) = F(φ) + 2nK 延拓
    """
    mod = _as_modulus(k)
    mod.require_unit_interval(allow_zero=True)
    turns = round(phi / math.pi)
    rest = phi - turns * math.pi
    s, c = math.sin(rest), math.cos(rest)
    base = s * _carlson_rf(c * c, 1.0 - mod.ksq * s * s, 1.0)
    return base + 2.0 * turns * elliptic_K(mod)


def cubic_invariants(roots: Tuple[complex, complex, complex]) -> Tuple[complex, complex]:
    """
    由 4(y-e₁)(y-e₂)(y-e₃)（e₁+e₂+e₃ = 0）求 g₂, g₃

    Returns:
        (g₂, g₃)，满足 4y³ - g₂y - g₃
    """
    e1, e2, e3 = (complex(r) for r in roots)
    if abs(e1 + e2 + e3) > 1e-12 * max(1.0, abs(e1), abs(e2), abs(e3)):
        raise ValueError("三根之和必须为零")
    g2 = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1)
    g3 = 4.0 * e1 * e2 * e3
    return g2, g3


def _quad(f, lo, hi, **kwargs) -> float:
    value, err = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200, **kwargs)
    if not math.isfinite(value) or err > _QUAD_TOL * max(1.0, abs(value)):
        raise QuadratureError(f"积分不收敛: 值={value}, 误差估计={err}")
    return value


def u0_integral(k, variant: str) -> complex:
    """
    u₀ = ∫ dx / √(4x(1∓x)(k⁻²∓x)) 到无穷

    紧情形沿 x + i0 积分，分为 [0,1]、[1,k⁻²]、[k⁻²,∞) 三段：
    第二段贡献纯虚部，第三段经 x = k⁻² + y² 换元去除端点奇性。
    非紧情形积分 ∫_{ε_k}^∞ dx / √(4x(1+x)(k⁻²+x))，ε_k = max(0, -k⁻²)，结果为实数。

    Args:
        k: EllipticModulus 或 k²
        variant: "compact" 或 "noncompact"

    Returns:
        u₀

    Raises:
        ModulusError: k² 不适用于该情形
        QuadratureError: 积分不收敛
    """
    mod = _as_modulus(k)
    if variant == "compact":
        mod.require_unit_interval()
        c = 1.0 / mod.ksq
        i1 = _quad(lambda x: 0.5 / math.sqrt(c - x), 0.0, 1.0, weight='alg', wvar=(-0.5, -0.5))
        i2 = _quad(lambda x: 0.5 / math.sqrt(x), 1.0, c, weight='alg', wvar=(-0.5, -0.5))
        i3 = _quad(lambda y: 1.0 / math.sqrt((c + y * y) * (c + y * y - 1.0)), 0.0, math.inf)
        return complex(i1 - i3, i2)
    if variant == "noncompact":
        if mod.ksq == 0.0:
            raise ModulusError("非紧情形要求 k² ≠ 0", kind="modulus-out-of-range")
        c = 1.0 / mod.ksq
        if c > 0.0:
            # x = y² 换元
            value = _quad(lambda y: 1.0 / math.sqrt((1.0 + y * y) * (c + y * y)), 0.0, math.inf)
        else:
            # x = ε_k + y² 换元，ε_k = -k⁻²
            eps = -c
            value = _quad(lambda y: 1.0 / math.sqrt((eps + y * y) * (1.0 + eps + y * y)), 0.0, math.inf)
        return complex(value, 0.0)
    raise ValueError(f"未知情形: {variant}")
