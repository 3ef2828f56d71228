"""
Baker-Akhiezer 函数
φ⁻ʲ(p, t) = γ_j(t) e^{tΩ̃(p)} θ₁(-A(p)+A₁+A(P_j)+Vt) θ₁(-A(p)) / [θ₁(-A(p)+A₁) θ₁(-A(p)+A(P_j))]，
Ω̃ = Ω - V/2，φ₊ = e^{-μt} φ₋
"""

import cmath
from typing import Optional, Tuple

import numpy as np

from common.errors import CanonicalWindowError, PoleError, QuadratureError
from common.log import get_logger
from common.settings import tolerances
from curve import (
    COMPACT, SurfacePoint, abel, infinity_point, lattice_reduce, mu, omega_of_z,
)
from dynamics import RotatorState, evolve_state, lax_parts, modulus_ksq, rotation_period
from special import theta1, theta1_dlog, u0_integral
from .context import BAContext

logger = get_logger("BA")

RESIDUE_SAMPLE_BASE = 1e-2
RESIDUE_SAMPLE_COUNT = 6
FD_RELATIVE_STEP = 1e-5
ORACLE_STEP = 1e-3


def _other(j: int) -> int:
    if j not in (1, 2):
        raise ValueError(f"BA 指标必须为 1 或 2: j={j}")
    return 3 - j


def time_scale(ctx: BAContext) -> float:
    """紧情形取转动周期，非紧情形取发散时间 u₀/(2a)"""
    c = ctx.curve
    if c.variant == COMPACT:
        return rotation_period(c.a, c.E)
    return u0_integral(modulus_ksq(c.a, c.E), c.variant).real / (2.0 * c.a)


def canonical_margin(t: float, ctx: BAContext) -> float:
    """|θ₁(A₁ + Vt)|/|θ₁′(0)|（约化到原点附近），规范窗口要求其大于 eps_canonical"""
    m = ctx.curve.modulus
    r = lattice_reduce(ctx.A1 + ctx.V * t, ctx.curve)
    return abs(theta1(r, m) / m.theta1_prime_zero)


def gamma_j(j: int, t: float, ctx: BAContext, eps_canonical: Optional[float] = None) -> complex:
    """
    γ_j(t) = d_j e^{-tΩ̃_j⁰} θ₁(A₁ - A_j) α_j θ₁′(0) / [θ₁(A₁ + Vt) θ₁(-A_j)]

    Raises:
        CanonicalWindowError: θ₁(A₁ + Vt) 趋于零
    """
    _other(j)
    eps_canonical = tolerances.eps_canonical if eps_canonical is None else eps_canonical
    margin = canonical_margin(t, ctx)
    if margin < eps_canonical:
        raise CanonicalWindowError(f"t={t} 处 θ₁(A₁+Vt) 过小 ({margin:.3e})")
    i = j - 1
    m = ctx.curve.modulus
    a_j = ctx.AP[i]
    omega_tilde0 = ctx.Omega0_j[i] - 0.5 * ctx.V
    return (ctx.dj[i] * cmath.exp(-t * omega_tilde0) * theta1(ctx.A1 - a_j, m) * ctx.alpha_j[i]
            * m.theta1_prime_zero / (theta1(ctx.A1 + ctx.V * t, m) * theta1(-a_j, m)))


def ba_minus_z(j: int, z: complex, omega: complex, t: float, ctx: BAContext,
               eps_pole: Optional[float] = None) -> complex:
    """
    以 Abel 像 z = A(p) 与 Ω(p) 为输入求 φ⁻ʲ

    Raises:
        PoleError: p 落在除子点 p₁ 或 P_j 上
    """
    _other(j)
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    i = j - 1
    m = ctx.curve.modulus
    a_j = ctx.AP[i]
    denominator = theta1(-z + ctx.A1, m) * theta1(-z + a_j, m)
    if abs(denominator) < eps_pole * abs(m.theta1_prime_zero) ** 2:
        raise PoleError(f"φ^{j} 在 A(p)={z:.6g} 处有极点", kind="pole-of-BA")
    numerator = theta1(-z + ctx.A1 + a_j + ctx.V * t, m) * theta1(-z, m)
    return gamma_j(j, t, ctx) * cmath.exp(t * (omega - 0.5 * ctx.V)) * numerator / denominator


def offdiag_value(j: int, t: float, ctx: BAContext) -> complex:
    """
    φʲ 在 P_{j*} 处的有限值

    φʲ(P_{j*}, t) = γ_j e^{tΩ̃_{j*}⁰} θ₁(A₁ + A_j - A_{j*} + Vt) θ₁(-A_{j*}) / [θ₁(A₁ - A_{j*}) θ₁(A_j - A_{j*})]
    """
    k = _other(j)
    m = ctx.curve.modulus
    a_j, a_k = ctx.AP[j - 1], ctx.AP[k - 1]
    omega_tilde0 = ctx.Omega0_j[k - 1] - 0.5 * ctx.V
    return (gamma_j(j, t, ctx) * cmath.exp(t * omega_tilde0)
            * theta1(ctx.A1 + a_j - a_k + ctx.V * t, m) * theta1(-a_k, m)
            / (theta1(ctx.A1 - a_k, m) * theta1(a_j - a_k, m)))


def ba_minus(j: int, p: SurfacePoint, t: float, ctx: BAContext, sigma: Optional[int] = None) -> complex:
    """
    φ⁻ʲ(p, t)

    Args:
        j: 1 或 2
        p: 曲线上的点
        t: 时间
        ctx: BA 上下文
        sigma: Abel 积分路径走上 (+1) 或下 (-1) 半平面

    Returns:
        φ⁻ʲ(p, t)

    Raises:
        PoleError: p 为 P_j（一阶极点）、0±（本性奇点）或除子点
        CanonicalWindowError: t 超出规范窗口
    """
    k = _other(j)
    if p.is_infinite:
        if p.sheet == infinity_point(k, ctx.curve.rho).sheet:
            return offdiag_value(j, t, ctx)
        raise PoleError(f"φ^{j} 在 P_{j} 处有极点", kind="pole-of-BA")
    if p.is_zero:
        raise PoleError(f"φ^{j} 在 {p.marked} 处有本性奇点", kind="pole-at-marked-point")
    z = abel(p, ctx.curve, sigma=sigma)
    return ba_minus_z(j, z, omega_of_z(z, ctx.curve), t, ctx)


def ba_plus(j: int, p: SurfacePoint, t: float, ctx: BAContext, sigma: Optional[int] = None) -> complex:
    """φ₊ʲ(p, t) = e^{-μ(p)t} φ⁻ʲ(p, t)"""
    return cmath.exp(-mu(p, ctx.curve) * t) * ba_minus(j, p, t, ctx, sigma)


def richardson(zetas: np.ndarray, values: np.ndarray) -> complex:
    """
    ζ_m = ζ₀·2^{-m} 上的采样外推到 ζ = 0（假定按 ζ 的幂级数展开）

    Raises:
        QuadratureError: 外推表最后两级不收敛
    """
    table = [np.asarray(values, dtype=complex)]
    for level in range(1, len(zetas)):
        prev = table[-1]
        factor = 2.0 ** level
        table.append((factor * prev[1:] - prev[:-1]) / (factor - 1.0))
    best, second = table[-1][0], table[-2][-1]
    if abs(best - second) > 1e-6 * max(1.0, abs(best)):
        raise QuadratureError(f"Richardson 外推不收敛: {abs(best - second):.3e}",
                              kind="extrapolation-nonconvergence")
    return complex(best)


def leading_coefficient(j: int, t: float, ctx: BAContext, zeta0: float = RESIDUE_SAMPLE_BASE) -> complex:
    """
    Res_{P_j}(λ⁻¹φ⁻ʲ)：在 λ = 1/ζ 处采样 λ⁻¹φ⁻ʲ 并外推，应等于 d_j
    """
    sheet = infinity_point(j, ctx.curve.rho).sheet
    zetas = zeta0 * 2.0 ** -np.arange(RESIDUE_SAMPLE_COUNT)
    values = np.array([z * ba_minus(j, SurfacePoint(1.0 / z, sheet), t, ctx) for z in zetas])
    return richardson(zetas, values)


def expansion_coeffs(j: int, t: float, ctx: BAContext) -> Tuple[np.ndarray, np.ndarray]:
    """
    P_j 处本征向量 (φ¹, φ²) = λψ₀ʲ + ψ₁ʲ + O(λ⁻¹)

    ψ₀ʲ = d_j e_j；ψ₁ʲ 的第 j 分量
    d_j[tΩ_j¹ + α_j(θ₁′/θ₁(A₁+Vt) + θ₁′/θ₁(-A_j) - θ₁′/θ₁(A₁-A_j))]，
    另一分量为 φ^{j*}(P_j, t)

    Returns:
        (ψ₀ʲ, ψ₁ʲ)
    """
    k = _other(j)
    i = j - 1
    m = ctx.curve.modulus
    a_j = ctx.AP[i]
    psi0 = np.zeros(2, dtype=complex)
    psi0[i] = ctx.dj[i]
    psi1 = np.zeros(2, dtype=complex)
    psi1[i] = ctx.dj[i] * (t * ctx.Omega1_j[i] + ctx.alpha_j[i] * (
        theta1_dlog(ctx.A1 + ctx.V * t, m) + theta1_dlog(-a_j, m) - theta1_dlog(ctx.A1 - a_j, m)))
    psi1[k - 1] = offdiag_value(k, t, ctx)
    return psi0, psi1


def _oracle_state(t: float, ctx: BAContext, state: Optional[RotatorState]) -> RotatorState:
    if state is not None:
        return state
    if ctx.state0 is None:
        raise ValueError("需要初态或 t 时刻的参照状态")
    return evolve_state(ctx.state0, t, ORACLE_STEP * time_scale(ctx))


def check_cosid(t: float, ctx: BAContext, j: int = 1, state: Optional[RotatorState] = None) -> float:
    """
    对角恒等式 Ω_j¹ + α_jV·(log θ₁)″(A₁+Vt) = 𝐬_jj(t)

    Returns:
        |左边 - 𝐬_jj(t)|
    """
    _other(j)
    i = j - 1
    m = ctx.curve.modulus
    lhs = ctx.Omega1_j[i] + ctx.alpha_j[i] * ctx.V * theta1_dlog(ctx.A1 + ctx.V * t, m, 2)
    s_mat = lax_parts(_oracle_state(t, ctx, state))[1]
    residual = abs(lhs - s_mat[i, i])
    logger.debug(f"cosid j={j} t={t}: 残差 {residual:.3e}")
    return residual


def check_sinid(t: float, ctx: BAContext, j: int = 1, state: Optional[RotatorState] = None,
                step: Optional[float] = None) -> float:
    """
    非对角恒等式 d/dt φʲ(P_{j*}, t) = 𝐬_{j j*}(t) d_{j*}，导数用中心差分

    Returns:
        |左边 - 右边|
    """
    k = _other(j)
    h = step if step is not None else FD_RELATIVE_STEP * time_scale(ctx)
    lhs = (offdiag_value(j, t + h, ctx) - offdiag_value(j, t - h, ctx)) / (2.0 * h)
    s_mat = lax_parts(_oracle_state(t, ctx, state))[1]
    residual = abs(lhs - s_mat[j - 1, k - 1] * ctx.dj[k - 1])
    logger.debug(f"sinid j={j} t={t}: 残差 {residual:.3e}")
    return residual
