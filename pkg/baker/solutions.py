"""
闭式解
紧情形 sin²φ = ℘(2at + A₁/α) + (1 + k⁻²)/3，非紧情形 sinh²q = ℘(2at + A₁/α) - (1 + k⁻²)/3；
theta 形式 sin²φ = ½ - Ω₁¹/(2a) - α²(log θ₁)″(A₁ + Vt)
"""

from typing import Dict, Optional

from common.errors import IdentityViolation, PoleError
from common.log import get_logger
from common.settings import tolerances
from curve import COMPACT, NONCOMPACT
from dynamics import modulus_ksq, omega_tilde
from special import jacobi_sn, theta1_dlog, wp
from .context import BAContext

logger = get_logger("BA")


def _require(ctx: BAContext, variant: str) -> None:
    if ctx.curve.variant != variant:
        raise ValueError(f"该解只适用于 {variant} 情形，当前为 {ctx.curve.variant}")


def _real(value: complex, label: str) -> float:
    """
    Raises:
        IdentityViolation: 虚部超过 reality·max(1, |实部|)
    """
    value = complex(value)
    if abs(value.imag) > tolerances.reality * max(1.0, abs(value.real)):
        raise IdentityViolation(f"{label} 不是实数: {value:.6g}", kind="reality-violated")
    return float(value.real)


def _constant(ctx: BAContext, constant: Optional[float]) -> complex:
    """显式常数优先，其次为 t = 0 拟合值，无初态时取 ±(1 + k⁻²)/3"""
    if constant is not None:
        return constant
    if ctx.additive_constant is not None:
        return ctx.additive_constant
    return analytic_constant(ctx)


def analytic_constant(ctx: BAContext) -> float:
    """±(1 + k⁻²)/3，紧情形取正号"""
    c = ctx.curve
    value = (1.0 + 1.0 / modulus_ksq(c.a, c.E)) / 3.0
    return value if c.variant == COMPACT else -value


def wp_phase(t: float, ctx: BAContext) -> complex:
    """℘ 的自变量 2at + A₁/α"""
    return 2.0 * ctx.curve.a * t + ctx.u1


def wp_route(t: float, ctx: BAContext) -> complex:
    """
    ℘(2at + A₁/α)，格为 (𝒜, ℬ)

    Raises:
        PoleError: 自变量落在格点上（kind = pole-encountered）
    """
    try:
        return wp(wp_phase(t, ctx), ctx.lattice)
    except PoleError as e:
        raise PoleError(f"t={t} 处 ℘ 发散: {e}", kind="pole-encountered")


def theta_route(t: float, ctx: BAContext) -> complex:
    """±½ - Ω₁¹/(2a) - α²(log θ₁)″(A₁ + Vt)，紧情形取 +½"""
    c = ctx.curve
    half = 0.5 if c.variant == COMPACT else -0.5
    try:
        second = theta1_dlog(ctx.A1 + ctx.V * t, c.modulus, 2)
    except PoleError as e:
        raise PoleError(f"t={t} 处 theta 形式发散: {e}", kind="pole-encountered")
    return half - ctx.Omega1_j[0] / (2.0 * c.a) - c.alpha ** 2 * second


def solution_sin2(t: float, ctx: BAContext, constant: Optional[float] = None) -> float:
    """
    紧情形 sin²φ(t) 的 ℘ 形式

    Args:
        t: 时间
        ctx: BA 上下文
        constant: 加性常数，缺省取 t = 0 拟合值（无初态时为 (1 + k⁻²)/3）

    Returns:
        sin²φ(t)

    Raises:
        IdentityViolation: 结果非实（除子非物理）
    """
    _require(ctx, COMPACT)
    shift = _constant(ctx, constant)
    return _real(wp_route(t, ctx) + shift, "sin²φ")


def solution_sin2_theta(t: float, ctx: BAContext) -> float:
    """紧情形 sin²φ(t) 的 θ₁ 形式"""
    _require(ctx, COMPACT)
    return _real(theta_route(t, ctx), "sin²φ")


def solution_sinh2(t: float, ctx: BAContext, constant: Optional[float] = None) -> float:
    """
    非紧情形 sinh²q(t) 的 ℘ 形式，在 2at + A₁/α 经过格点时发散

    常数缺省规则同 solution_sin2

    Raises:
        PoleError: t 为发散时刻
        IdentityViolation: 结果非实
    """
    _require(ctx, NONCOMPACT)
    shift = _constant(ctx, constant)
    return _real(wp_route(t, ctx) + shift, "sinh²q")


def solution_sinh2_theta(t: float, ctx: BAContext) -> float:
    """非紧情形 sinh²q(t) 的 θ₁ 形式"""
    _require(ctx, NONCOMPACT)
    return _real(theta_route(t, ctx), "sinh²q")


def solution_sn(t: float, a: float, E: float) -> float:
    """φ(0) = 0、φ̇(0) > 0 时 sin²φ = sn²(ω̃t, k)"""
    ksq = modulus_ksq(a, E)
    return float(jacobi_sn(omega_tilde(a, E) * t, ksq)) ** 2


def additive_constants(ctx: BAContext) -> Dict[str, float]:
    """
    ℘ 形式的三种加性常数

    - analytic: ±(1 + k⁻²)/3，作为拟合值的对照
    - t0_matched: t = 0 处与初态匹配（上下文缺省使用的值）
    - theta_route: theta 形式与 ℘ 在 t = 0 处之差
    """
    wp0 = wp_route(0.0, ctx)
    result = {
        'analytic': analytic_constant(ctx),
        'theta_route': _real(theta_route(0.0, ctx) - wp0, "theta 常数"),
    }
    if ctx.additive_constant is not None:
        result['t0_matched'] = _real(ctx.additive_constant, "t=0 常数")
    logger.debug(f"加性常数: {result}")
    return result
