"""
Baker-Akhiezer 上下文
除子点 p₁、各 Abel 像、theta 常数 c₀/c₁/c_j/c、留数常数 d_j 与 ∞ 处展开系数
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from common.errors import DegenerateDivisorError, IdentityViolation, QuadratureError
from common.log import get_logger
from common.settings import tolerances
from curve import (
    COMPACT, CurveData, SurfacePoint, abel, abel_invert, build_curve, expansion_at_infinity,
    expansion_closed_form, lattice_reduce, marked_images, mu, zero_point,
)
from dynamics import RotatorState, build_lax, lax_parts
from special import WeierstrassLattice, theta, theta1, wp

logger = get_logger("BA")

_PHYSICAL_IMAG_TOL = 1e-9
_RING_RADIUS = 1e-2
# A₁ 与半周期的重合判定
_HALF_PERIOD_TOL = 1e-8


@dataclass(frozen=True)
class BAContext:
    """
    BA 函数所需的全部常数

    A1 = A(p₁)，AP = (A(P₁), A(P₂))，A0 = (A(0⁺), A(0⁻))；
    c₀ = πi + B/2，c₁ = A₁ + c₀，c_j = A(P_j) + c₀，c = c₁ + c_j - c₀
    """

    curve: CurveData
    p0: SurfacePoint
    p1: SurfacePoint
    gamma0: Optional[SurfacePoint]
    A1: complex
    AP: Tuple[complex, complex]
    A0: Tuple[complex, complex]
    c0: complex
    c1: complex
    cj: Tuple[complex, complex]
    c: Tuple[complex, complex]
    dj: Tuple[complex, complex]
    alpha_j: Tuple[complex, complex]
    Omega0_j: Tuple[complex, complex]
    Omega1_j: Tuple[complex, complex]
    lattice: WeierstrassLattice
    state0: Optional[RotatorState] = None
    physical: bool = True
    # ℘ 形式的加性常数：有初态时按 t = 0 拟合
    additive_constant: Optional[complex] = None

    @property
    def V(self) -> complex:
        return self.curve.V

    @property
    def u1(self) -> complex:
        """℘ 的相位 A₁/α"""
        return self.A1 / self.curve.alpha

    def to_dict(self) -> dict:
        def pair(z):
            return [complex(z).real, complex(z).imag]

        return {
            'p1': self.p1.to_dict(),
            'A1': pair(self.A1),
            'A_inf': [pair(z) for z in self.AP],
            'A_zero': [pair(z) for z in self.A0],
            'd': [pair(z) for z in self.dj],
            'alpha_j': [pair(z) for z in self.alpha_j],
            'Omega0': [pair(z) for z in self.Omega0_j],
            'Omega1': [pair(z) for z in self.Omega1_j],
            'u1': pair(self.u1),
            'physical': self.physical,
            'additive_constant': None if self.additive_constant is None else pair(self.additive_constant),
        }


def physical_divisor(curve: CurveData, state0: RotatorState) -> Tuple[SurfacePoint, complex]:
    """
    与初态匹配的除子

    t = 0 时本征向量分量比 (μ + L₁₁)/L₂₁ 在有限处的极点 γ₀ 位于 L₂₁(λ) = 0，
    即 λ_γ = -𝐬₂₁/𝐥₂₁，取 μ = L₁₁ 的那一叶；λ_γ = 0 时取 a·w(0) = 𝐬₁₁ 的零点。
    BA 分量比的极点在 A₁ - A(P₁)，因此 A₁ = A(γ₀) + A(P₁)

    Returns:
        (γ₀, A₁)

    Raises:
        DegenerateDivisorError: γ₀ 落在分支点
    """
    l_mat, s_mat = lax_parts(state0)
    l21, s21, s11 = l_mat[1, 0], s_mat[1, 0], s_mat[0, 0]
    if abs(s21) < 1e-14 * max(1.0, state0.a):
        point = zero_point(1 if s11.real > 0.0 else -1)
    else:
        lam = complex(-s21 / l21)
        kappa = lam / curve.rho
        for e in (curve.lminus, curve.lplus, -curve.lminus, -curve.lplus):
            if abs(kappa - e) < 1e-8:
                raise DegenerateDivisorError(f"γ₀ 位于分支点 κ={e}")
        upper = SurfacePoint(lam, 1)
        l11 = build_lax(state0, lam).L[0, 0]
        sheet = 1 if abs(mu(upper, curve) - l11) <= abs(mu(upper, curve) + l11) else -1
        point = SurfacePoint(lam, sheet)
    a_p1 = marked_images(curve)[1]
    A1 = abel(point, curve) + a_p1
    logger.info(f"物理除子: γ₀ = {point.marked or point.lam} (sheet {point.sheet}), A₁ = {A1:.12g}")
    return point, A1


def _row_normalization(curve: CurveData, A1: complex, d1: complex, state0: RotatorState) -> complex:
    """
    d₂ 使 P₁ 处 φ²(P₁, 0) = d₁·𝐥₂₁/(2a)

    d₂ = 1 时 φ²(P₁, 0) = -αθ₁′(0)θ₁(A₁+A₊)θ₁(A₁-2A₊) / [θ₁(A₁)θ₁(A₁-A₊)θ₁(2A₊)]，A₊ = A(P₁)
    """
    m = curve.modulus
    a_plus = marked_images(curve)[1]
    unit = (-curve.alpha * m.theta1_prime_zero * theta1(A1 + a_plus, m) * theta1(A1 - 2.0 * a_plus, m)
            / (theta1(A1, m) * theta1(A1 - a_plus, m) * theta1(2.0 * a_plus, m)))
    l21 = lax_parts(state0)[0][1, 0]
    return d1 * l21 / (2.0 * state0.a) / unit


def _half_periods(curve: CurveData):
    """四个半周期及与之对应的分支点 κ"""
    return ((0j, curve.lminus), (1j * math.pi, curve.lplus),
            (0.5 * curve.B, -curve.lminus), (1j * math.pi + 0.5 * curve.B, -curve.lplus))


def _matching_half_period(curve: CurveData, A1: complex) -> Optional[Tuple[complex, float]]:
    """A₁ 模格落在半周期上时返回 (去掉舍入误差的 A₁, 分支点 κ)"""
    for half, branch in _half_periods(curve):
        offset = lattice_reduce(A1 - half, curve)
        if abs(offset) < _HALF_PERIOD_TOL:
            return A1 - offset, branch
    return None


def _check_nondegenerate(curve: CurveData, A1: complex, eps_pole: float) -> None:
    """
    Raises:
        DegenerateDivisorError: BA 公式分母中的 θ₁ 值下溢
    """
    m = curve.modulus
    scale = abs(m.theta1_prime_zero)
    _, a_p1, a_p2 = marked_images(curve)
    for label, value in [("θ₁(A₁)", A1), ("θ₁(A₁ - A(P₁))", A1 - a_p1),
                         ("θ₁(A₁ - A(P₂))", A1 - a_p2), ("θ₁(A(P₁))", a_p1)]:
        if abs(theta1(lattice_reduce(value, curve), m)) < eps_pole * scale:
            raise DegenerateDivisorError(f"{label} 下溢，除子退化")


# 缺省除子点 λ/l₊ 的候选
_DEFAULT_DIVISOR_CANDIDATES = (1j, 2j, 0.5 + 1j)


def default_divisor(curve: CurveData, eps_pole: Optional[float] = None) -> SurfacePoint:
    """
    无初态时的除子点

    依次尝试 λ = i·l₊、2i·l₊、(½ + i)·l₊（sheet +1），跳过分支点与退化位置

    Raises:
        DegenerateDivisorError: 所有候选都不可用
    """
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    for factor in _DEFAULT_DIVISOR_CANDIDATES:
        point = SurfacePoint(factor * curve.lplus, 1)
        try:
            A1 = abel(point, curve)
            if _matching_half_period(curve, A1) is not None:
                raise DegenerateDivisorError(f"λ={point.lam} 位于分支点")
            _check_nondegenerate(curve, A1, eps_pole)
        except (QuadratureError, DegenerateDivisorError) as e:
            logger.debug(f"跳过候选除子点 λ={point.lam}: {e}")
            continue
        logger.info(f"未给初态，除子点取 λ = {point.lam:.12g}")
        return point
    raise DegenerateDivisorError("没有可用的缺省除子点")


def check_condition_b(curve: CurveData, AP: Tuple[complex, complex], c0: complex,
                      cj: Tuple[complex, complex]) -> float:
    """
    θ(A(p) - c₀) 在 p₀ 处为零，θ(A(p) - c_j) 在 P_j 处为零

    零点处的值与邻近小圆上的中位数之比作为残差

    Returns:
        最大相对残差
    """
    m = curve.modulus
    angles = 2.0 * math.pi * np.arange(8) / 8
    worst = 0.0
    for center, shift in [(0j, c0), (AP[0], cj[0]), (AP[1], cj[1])]:
        at_zero = abs(theta(center - shift, m))
        ring = [abs(theta(center + _RING_RADIUS * np.exp(1j * t) - shift, m)) for t in angles]
        worst = max(worst, at_zero / float(np.median(ring)))
    return worst


def build_context(curve: CurveData, state0: Optional[RotatorState] = None,
                  p1: Optional[SurfacePoint] = None, d1: complex = 1.0 + 0j,
                  eps_pole: Optional[float] = None, check_expansion: bool = True) -> BAContext:
    """
    构造 BA 上下文

    缺省由初态求物理除子；显式给出 p1 时仍用初态（若有）固定 d₂；
    两者都没有时取 default_divisor。
    物理除子的 A₁ 落在半周期上时不做 Abel 逆映射，p₁ 直接取对应分支点

    Args:
        curve: 谱曲线
        state0: 初态
        p1: 覆盖用的除子点
        d1: 留数常数 d₁
        eps_pole: θ₁ 非退化阈值，缺省取全局 eps_pole
        check_expansion: 是否以采样外推校验 ∞ 处展开

    Returns:
        BAContext

    Raises:
        DegenerateDivisorError: 除子退化或 θ₁ 值过小
        IdentityViolation: 条件 (b) 零点校验失败
    """
    eps_pole = tolerances.eps_pole if eps_pole is None else eps_pole
    z_plus, a_p1, a_p2 = marked_images(curve)
    gamma0 = None
    if p1 is None and state0 is None:
        p1 = default_divisor(curve, eps_pole)

    if p1 is None:
        gamma0, A1 = physical_divisor(curve, state0)
        matched = _matching_half_period(curve, A1)
        if matched is not None:
            A1, branch = matched
            p1 = SurfacePoint(branch * curve.rho, 1)
            logger.info(f"A₁ = {A1:.12g} 为半周期，p₁ 取分支点 κ = {branch:.12g}")
        else:
            p1 = abel_invert(A1, curve)
    else:
        A1 = abel(p1, curve)
        if _matching_half_period(curve, A1) is not None:
            raise DegenerateDivisorError("除子点 p₁ 位于分支点")

    _check_nondegenerate(curve, A1, eps_pole)

    d2 = _row_normalization(curve, A1, d1, state0) if state0 is not None else 1.0 + 0j

    expansions = [expansion_closed_form(j, curve) for j in (1, 2)]
    if check_expansion:
        for j in (1, 2):
            expansion_at_infinity(j, curve)

    c0 = 1j * math.pi + 0.5 * curve.B
    c1 = A1 + c0
    cj = (a_p1 + c0, a_p2 + c0)
    c = (c1 + cj[0] - c0, c1 + cj[1] - c0)

    residual = check_condition_b(curve, (a_p1, a_p2), c0, cj)
    if residual > tolerances.condition_b:
        raise IdentityViolation(f"条件 (b) 零点校验失败: {residual:.3e}")

    u1 = A1 / curve.alpha
    physical = _is_physical(curve, u1)
    if not physical:
        logger.warning(f"除子非物理: A₁/α = {u1:.12g}")

    lattice = WeierstrassLattice.from_periods(curve.Acal, curve.Bcal)
    additive = None
    if state0 is not None:
        observed = math.sin(state0.angle) ** 2 if curve.variant == COMPACT else math.sinh(state0.angle) ** 2
        additive = complex(observed - wp(u1, lattice))

    ctx = BAContext(
        curve=curve, p0=SurfacePoint(curve.lminus * curve.rho, 1), p1=p1, gamma0=gamma0,
        A1=A1, AP=(a_p1, a_p2), A0=(z_plus, -z_plus),
        c0=c0, c1=c1, cj=cj, c=c, dj=(complex(d1), complex(d2)),
        alpha_j=(expansions[0][0], expansions[1][0]),
        Omega0_j=(expansions[0][1], expansions[1][1]),
        Omega1_j=(expansions[0][2], expansions[1][2]),
        lattice=lattice, state0=state0, physical=physical, additive_constant=additive,
    )
    logger.info(f"BA 上下文构造完成: d₂ = {d2:.12g}")
    return ctx


def _is_physical(curve: CurveData, u1: complex) -> bool:
    """
    紧情形要求 2at + A₁/α 的直线不经过格点（Im(A₁/α) 不在格点虚部上），
    非紧情形要求 A₁/α 与某个格点同虚部（实解在有限时刻发散）
    """
    hits = _line_hits_lattice(curve, u1)
    return not hits if curve.variant == COMPACT else hits


def _line_hits_lattice(curve: CurveData, u1: complex, span: int = 12) -> bool:
    scale = max(abs(curve.Acal), abs(curve.Bcal))
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            point = m * curve.Acal + n * curve.Bcal
            if abs(point.imag - u1.imag) < _PHYSICAL_IMAG_TOL * scale:
                return True
    return False


def default_context(a: float = 1.0, E: float = 3.0, variant: str = COMPACT) -> BAContext:
    """φ(0) = 0（或 q(0) = 0）、动量为正的标准初态下的上下文"""
    curve = build_curve(a, E, variant)
    state0 = RotatorState.from_energy(variant, a, E, 0.0)
    return build_context(curve, state0)
