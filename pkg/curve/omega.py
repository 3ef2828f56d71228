"""
第二类 Abel 积分 Ω 与速度常数 V

Ω(z) = aα[ζ₁(z - z₊) + ζ₁(z - z₋)]，ζ₁ = θ₁′/θ₁，z± = A(0±) 且 z₋ = -z₊；
Ω 在 0± 处有留数 ±a（以 λ 计），a-周期为零，沿 b-cycle 增量为 -V，V = 2aα
"""

import math
from typing import Dict, Tuple

import numpy as np

from common.errors import IdentityViolation, PoleError, QuadratureError
from common.log import get_logger
from special import theta1_dlog
from .abel import abel, marked_images, path_integral
from .periods import a_cycle, b_cycle, period
from .spectral import CurveData, mu, w
from .surface import SurfacePoint, infinity_point

logger = get_logger("Curve")

RESIDUE_TOL = 1e-8
B_CYCLE_TOL = 1e-6
EXPANSION_TOL = 1e-6
SAMPLE_BASE = 1e-2
SAMPLE_COUNT = 6


def omega_of_z(z: complex, c: CurveData) -> complex:
    """以 Abel 像为自变量的 Ω"""
    z_plus = marked_images(c)[0]
    m = c.modulus
    try:
        return c.a * c.alpha * (theta1_dlog(z - z_plus, m, 1) + theta1_dlog(z + z_plus, m, 1))
    except PoleError as e:
        raise PoleError(f"Ω 在 0± 处有极点: {e}", kind="pole-at-marked-point")


def omega_prime(z: complex, c: CurveData) -> complex:
    """dΩ/dz"""
    z_plus = marked_images(c)[0]
    m = c.modulus
    return c.a * c.alpha * (theta1_dlog(z - z_plus, m, 2) + theta1_dlog(z + z_plus, m, 2))


def omega_sk(p: SurfacePoint, c: CurveData) -> complex:
    """
    Ω(p)，p → 0± 时 Ω ≈ ±a/λ

    Raises:
        PoleError: p ∈ {0⁺, 0⁻}
    """
    if p.is_zero:
        raise PoleError(f"Ω 在 {p.marked} 处有极点", kind="pole-at-marked-point")
    return omega_of_z(abel(p, c), c)


def omega_differential_coefficients(c: CurveData) -> Tuple[complex, complex]:
    """
    dΩ = (P + Qκ⁻²) dκ/w 的系数，由 0⁺ 处主部与 a-周期为零确定

    Returns:
        (P, Q)
    """
    q = -c.a / c.rho
    inverse_square = period(c.lminus, c.lplus, 1.0, a_cycle(c.lminus, c.lplus),
                            weight=lambda k: 1.0 / (k * k))
    plain = c.Acal / c.rho
    return -q * inverse_square / plain, q


def omega_quadrature(p: SurfacePoint, c: CurveData) -> complex:
    """沿 Abel 标准路径直接积分 dΩ，与 theta 形式互为校验"""
    coef_p, coef_q = omega_differential_coefficients(c)
    kappa = None if p.is_infinite else p.kappa(c.rho)
    raw = path_integral(kappa, c.lminus, c.lplus, weight=lambda k: coef_p + coef_q / (k * k))
    return p.sheet * raw


def velocity_residuals(c: CurveData) -> Dict[str, float]:
    """
    V 的三项自检

    - vt: θ 形式 Ω 沿 B 平移的增量与 -V 的相对差
    - residue: -Σ Res_{P_k}(μω) 与 V 的相对差，ω 用重新积分的 a-周期归一化
    - b_cycle: 直接沿 b-cycle 积分 dΩ 与 -V 的相对差
    """
    V = c.V
    z0 = 0.37 + 0.21j
    increment = omega_of_z(z0 + c.B, c) - omega_of_z(z0, c)
    vt = abs(increment + V) / abs(V)

    fresh = period(c.lminus, c.lplus, c.rho, a_cycle(c.lminus, c.lplus))
    alpha_fresh = 2j * math.pi / fresh
    residue_sum = 0j
    for j in (1, 2):
        residue_sum += _residue_at_infinity(j, c, alpha_fresh)
    residue = abs(V + residue_sum) / abs(V)

    coef_p, coef_q = omega_differential_coefficients(c)
    orientation = -1.0 if c.b_flipped else 1.0
    loop = orientation * period(c.lminus, c.lplus, 1.0, b_cycle(c.lminus, c.lplus),
                                weight=lambda k: coef_p + coef_q / (k * k))
    b_cycle_err = abs(loop + V) / abs(V)

    logger.debug(f"V 自检: vt={vt:.3e}, residue={residue:.3e}, b_cycle={b_cycle_err:.3e}")
    return {'vt': vt, 'residue': residue, 'b_cycle': b_cycle_err}


def _residue_at_infinity(j: int, c: CurveData, alpha: complex) -> complex:
    """
    Res_{P_j}(μω)，ζ = 1/λ 上采样 -μα/(wζ) 并外推到 ζ = 0
    """
    sheet = infinity_point(j, c.rho).sheet
    zetas = SAMPLE_BASE * 2.0 ** -np.arange(SAMPLE_COUNT)
    values = []
    for zeta in zetas:
        p = SurfacePoint(1.0 / zeta, sheet)
        values.append(-mu(p, c) * alpha / (w(p, c) * zeta))
    return _extrapolate(zetas, np.array(values))[0]


def _extrapolate(zetas: np.ndarray, values: np.ndarray) -> Tuple[complex, complex]:
    """多项式拟合外推，返回 (常数项, 一次项)"""
    degree = min(4, len(zetas) - 1)
    re = np.polyfit(zetas, values.real, degree)
    im = np.polyfit(zetas, values.imag, degree)
    coeffs = re[::-1] + 1j * im[::-1]
    return complex(coeffs[0]), complex(coeffs[1])


def v_constant(c: CurveData, tol: float = RESIDUE_TOL) -> complex:
    """
    速度常数 V = 2aα，附带强制自检

    Raises:
        IdentityViolation: 留数和或 b-cycle 积分与 V 不符
    """
    checks = velocity_residuals(c)
    if checks['vt'] > tol or checks['residue'] > tol:
        raise IdentityViolation(
            f"V 恒等式不成立: vt={checks['vt']:.3e}, residue={checks['residue']:.3e}")
    if checks['b_cycle'] > B_CYCLE_TOL:
        raise IdentityViolation(f"b-cycle 积分与 V 不符: {checks['b_cycle']:.3e}")
    return c.V


def expansion_closed_form(j: int, c: CurveData) -> Tuple[complex, complex, complex]:
    """
    P_j 处展开 A(p) = A(P_j) - α_jζ，Ω(p) = Ω_j⁰ + Ω_j¹ζ + O(ζ²)

    Returns:
        (α_j, Ω_j⁰, Ω_j¹)，α₁ = α，α₂ = -α
    """
    point = infinity_point(j, c.rho)
    alpha_j = c.alpha * c.rho * c.rho * point.sheet
    a_pj = marked_images(c)[j]
    return alpha_j, omega_of_z(a_pj, c), -alpha_j * omega_prime(a_pj, c)


def expansion_at_infinity(j: int, c: CurveData, zeta0: float = SAMPLE_BASE) -> Tuple[complex, complex, complex]:
    """
    由 ζ = ζ₀·2^{-m} 处 Ω 的采样外推 Ω_j⁰、Ω_j¹

    Returns:
        (α_j, Ω_j⁰, Ω_j¹)

    Raises:
        QuadratureError: 外推结果与闭式不符
    """
    alpha_j, omega0, omega1 = expansion_closed_form(j, c)
    sheet = infinity_point(j, c.rho).sheet
    zetas = zeta0 * 2.0 ** -np.arange(SAMPLE_COUNT)
    samples = np.array([omega_sk(SurfacePoint(1.0 / z, sheet), c) for z in zetas])
    sampled0, sampled1 = _extrapolate(zetas, samples)
    scale = max(1.0, abs(omega0), abs(omega1))
    if abs(sampled0 - omega0) > EXPANSION_TOL * scale or abs(sampled1 - omega1) > EXPANSION_TOL * scale:
        raise QuadratureError(
            f"P_{j} 处展开外推不收敛: Ω⁰ 差 {abs(sampled0 - omega0):.3e}, Ω¹ 差 {abs(sampled1 - omega1):.3e}",
            kind="extrapolation-nonconvergence")
    return alpha_j, sampled0, sampled1
