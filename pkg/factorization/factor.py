"""
Riemann-Hilbert 分解
e^{tL(λ)} = g₊⁻¹(λ,t) g₋(λ,t)，g± = Φ±(λ,t) Φ±⁻¹(λ,0)，Φ±[j][k] = φ±ʲ(p_k, t)
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from baker import BAContext, ba_minus_z, canonical_margin, time_scale
from common.errors import (
    CanonicalWindowError, IdentityViolation, IllConditionedError, PoleError, QuadratureError,
)
from common.log import get_logger
from common.settings import tolerances
from curve import SurfacePoint, abel, mu, omega_of_z
from dynamics import RotatorState, build_lax, evolve_state, exp_traceless

logger = get_logger("Factorization")

CONJUGATION_TOL = 1e-7
ORACLE_TOL = 1e-6
ORACLE_STEP = 1e-3

CANONICAL = "canonical"
NON_CANONICAL = "non-canonical-suspected"

PLUS = "+"
MINUS = "-"


@dataclass
class FactorPair:
    """某个 (λ, t) 处的分解因子与残差"""

    lam: complex
    t: float
    gplus: np.ndarray
    gminus: np.ndarray
    residual: float
    conditioning: float
    det_error: float = 0.0

    def to_dict(self) -> dict:
        return {
            'lambda': [self.lam.real, self.lam.imag],
            't': self.t,
            'residual': self.residual,
            'conditioning': self.conditioning,
            'det_error': self.det_error,
        }


@dataclass
class FactorizationReport:
    """围道上的分解诊断"""

    contour: List[complex]
    times: List[float]
    pairs: List[FactorPair] = field(default_factory=list)
    skipped: List[dict] = field(default_factory=list)
    margins: List[float] = field(default_factory=list)
    classification: str = CANONICAL
    blowup_time_estimate: Optional[float] = None

    @property
    def max_residual(self) -> float:
        return max((p.residual for p in self.pairs), default=0.0)

    @property
    def min_margin(self) -> float:
        return min(self.margins, default=math.inf)

    @property
    def canonical(self) -> bool:
        return self.classification == CANONICAL

    def max_residual_at(self, t: float) -> float:
        return max((p.residual for p in self.pairs if p.t == t), default=0.0)

    def to_dict(self) -> dict:
        return {
            'contour_points': len(self.contour),
            'times': list(self.times),
            'classification': self.classification,
            'max_residual': self.max_residual,
            'min_canonical_margin': None if math.isinf(self.min_margin) else self.min_margin,
            'blowup_time_estimate': self.blowup_time_estimate,
            'per_time': [
                {'t': t, 'max_residual': self.max_residual_at(t), 'canonical_margin': m}
                for t, m in zip(self.times, self.margins)
            ],
            'samples': [p.to_dict() for p in self.pairs],
            'skipped': list(self.skipped),
        }


def default_contour(radius: float = 1.0, points: int = 64) -> List[complex]:
    """|λ| = radius 上错开半格的等距点，避开实轴上的分支点"""
    return [radius * cmath.exp(1j * (2.0 * math.pi * k / points + math.pi / points)) for k in range(points)]


@lru_cache(maxsize=4096)
def _fiber(lam: complex, ctx: BAContext) -> Tuple[complex, complex, complex]:
    """
    λ 上方 sheet + 点的 (A(p), Ω(p), μ(p))；sheet - 点取相反数

    Raises:
        QuadratureError: λ 为分支点
    """
    c = ctx.curve
    kappa = lam / c.rho
    for e in (c.lminus, c.lplus, -c.lminus, -c.lplus):
        if abs(kappa - e) < tolerances.eps_branch:
            raise QuadratureError(f"λ={lam} 为分支点，两个原像重合", kind="branch-point-collision")
    p = SurfacePoint(lam, 1)
    z = abel(p, c)
    return z, omega_of_z(z, c), mu(p, c)


def build_Phi(lam: complex, t: float, ctx: BAContext, sign: str = MINUS) -> np.ndarray:
    """
    Φ±[j][k] = φ±ʲ(p_k, t)，p₁ 在 sheet +，p₂ 在 sheet -

    Raises:
        QuadratureError: λ 为分支点
        PoleError: p_k 为 BA 函数的极点
        CanonicalWindowError: t 超出规范窗口
    """
    if sign not in (PLUS, MINUS):
        raise ValueError(f"sign 必须为 '+' 或 '-': {sign}")
    z, omega, mu_plus = _fiber(complex(lam), ctx)
    points = [(z, omega, mu_plus), (-z, -omega, -mu_plus)]
    phi = np.empty((2, 2), dtype=complex)
    for k, (zk, omega_k, mu_k) in enumerate(points):
        damping = cmath.exp(-mu_k * t) if sign == PLUS else 1.0
        for j in (1, 2):
            phi[j - 1, k] = damping * ba_minus_z(j, zk, omega_k, t, ctx)
    return phi


def _inverse(phi: np.ndarray, cond_max: Optional[float], lam: complex) -> Tuple[np.ndarray, float]:
    cond_max = tolerances.cond_max if cond_max is None else cond_max
    cond = float(np.linalg.cond(phi))
    if not cond < cond_max:
        raise IllConditionedError(f"Φ(λ={lam}, 0) 条件数 {cond:.3e} 超过 {cond_max:.1e}")
    return np.linalg.inv(phi), cond


def g_factor(lam: complex, t: float, ctx: BAContext, sign: str = MINUS,
             cond_max: Optional[float] = None) -> np.ndarray:
    """
    g±(λ, t) = Φ±(λ, t) Φ±⁻¹(λ, 0)

    Raises:
        IllConditionedError: Φ±(λ, 0) 条件数超过 cond_max
    """
    inverse, _ = _inverse(build_Phi(lam, 0.0, ctx, sign), cond_max, lam)
    return build_Phi(lam, t, ctx, sign) @ inverse


def factor_pair(state0: RotatorState, ctx: BAContext, lam: complex, t: float,
                cond_max: Optional[float] = None) -> FactorPair:
    """在单个 (λ, t) 处求 g± 与相对残差 ‖g₊⁻¹g₋ - e^{tL}‖_F / ‖e^{tL}‖_F"""
    lam = complex(lam)
    # Φ₊(λ, 0) = Φ₋(λ, 0)
    inverse, cond = _inverse(build_Phi(lam, 0.0, ctx, MINUS), cond_max, lam)
    gplus = build_Phi(lam, t, ctx, PLUS) @ inverse
    gminus = build_Phi(lam, t, ctx, MINUS) @ inverse
    target = exp_traceless(build_lax(state0, lam).L, t)
    product = np.linalg.solve(gplus, gminus)
    residual = float(np.linalg.norm(product - target) / np.linalg.norm(target))
    det_error = float(abs(np.linalg.det(product) - 1.0))
    return FactorPair(lam, float(t), gplus, gminus, residual, cond, det_error)


def verify_factorization(state0: RotatorState, ctx: BAContext, t: Union[float, Sequence[float]],
                         contour: Optional[Iterable[complex]] = None,
                         cond_max: Optional[float] = None, tol_fact: Optional[float] = None,
                         eps_canonical: Optional[float] = None, workers: int = 4) -> FactorizationReport:
    """
    在围道与时间网格上检验分解

    条件数超限的围道点记入 skipped；θ₁(A₁+Vt) 低于 eps_canonical 或残差超过 tol_fact
    时判为 non-canonical-suspected

    Args:
        state0: 初态（e^{tL} 中的 L(λ, 0)）
        ctx: BA 上下文
        t: 单个时刻或时刻序列
        contour: λ 采样点，缺省为单位圆 64 点
        cond_max: Φ(λ, 0) 条件数上限
        tol_fact: 残差阈值
        eps_canonical: 规范窗口阈值
        （三者缺省取全局容差）
        workers: 并发线程数

    Returns:
        FactorizationReport
    """
    tol_fact = tolerances.tol_fact if tol_fact is None else tol_fact
    eps_canonical = tolerances.eps_canonical if eps_canonical is None else eps_canonical
    times = [float(t)] if np.isscalar(t) else [float(x) for x in t]
    points = list(contour) if contour is not None else default_contour()
    report = FactorizationReport(contour=points, times=times, blowup_time_estimate=detect_blowup(ctx))
    suspicious = False

    for moment in times:
        margin = canonical_margin(moment, ctx)
        report.margins.append(margin)
        if margin < eps_canonical:
            logger.warning(f"t={moment} 超出规范窗口 (margin={margin:.3e})")
            suspicious = True
            continue

        def sample(lam):
            try:
                return factor_pair(state0, ctx, lam, moment, cond_max)
            except (IllConditionedError, QuadratureError, PoleError, CanonicalWindowError) as e:
                return {'lambda': [lam.real, lam.imag], 't': moment, 'kind': e.kind, 'error': str(e)}

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(sample, points))
        for result in results:
            if isinstance(result, FactorPair):
                report.pairs.append(result)
                if not result.residual < tol_fact:
                    suspicious = True
            else:
                if result['kind'] == CanonicalWindowError.kind:
                    suspicious = True
                logger.warning(f"跳过围道点 λ={result['lambda']}: {result['kind']}")
                report.skipped.append(result)

    if suspicious:
        report.classification = NON_CANONICAL
    logger.info(f"分解检验完成: {report.classification}, 最大残差 {report.max_residual:.3e}")
    return report


def conjugation_residuals(state0: RotatorState, ctx: BAContext, lam: complex, t: float,
                          cond_max: Optional[float] = None, h: Optional[float] = None) -> dict:
    """
    g₊L(λ,0)g₊⁻¹ 与 g₋L(λ,0)g₋⁻¹、RK4 演化 L(λ,t) 的差

    Returns:
        {'matrix', 'plus_minus', 'oracle', 'det'}；--p1 覆盖时 oracle 为 None
    """
    lam = complex(lam)
    L0 = build_lax(state0, lam).L
    gplus = g_factor(lam, t, ctx, PLUS, cond_max)
    gminus = g_factor(lam, t, ctx, MINUS, cond_max)
    via_plus = gplus @ L0 @ np.linalg.inv(gplus)
    via_minus = gminus @ L0 @ np.linalg.inv(gminus)
    scale = max(1.0, float(np.abs(L0).max()))
    result = {
        'matrix': via_plus,
        'plus_minus': float(np.abs(via_plus - via_minus).max()) / scale,
        'det': float(abs(np.linalg.det(via_plus) - np.linalg.det(L0))),
        'oracle': None,
    }
    if ctx.gamma0 is not None:
        step = h if h is not None else ORACLE_STEP * time_scale(ctx)
        evolved = build_lax(evolve_state(state0, t, step), lam).L
        result['oracle'] = float(np.abs(via_plus - evolved).max())
    return result


def evolve_by_conjugation(state0: RotatorState, ctx: BAContext, lam: complex, t: float,
                          cond_max: Optional[float] = None) -> np.ndarray:
    """
    L(λ, t) = g₊ L(λ, 0) g₊⁻¹

    Raises:
        IllConditionedError: Φ(λ, 0) 条件数超限
        IdentityViolation: 与 g₋ 共轭或 RK4 参照不符
    """
    checks = conjugation_residuals(state0, ctx, lam, t, cond_max)
    if checks['plus_minus'] > CONJUGATION_TOL:
        raise IdentityViolation(f"g₊ 与 g₋ 共轭结果不一致: {checks['plus_minus']:.3e}")
    if checks['oracle'] is not None and checks['oracle'] > ORACLE_TOL:
        raise IdentityViolation(f"共轭演化与 RK4 参照不符: {checks['oracle']:.3e}")
    logger.debug(f"共轭演化 λ={lam} t={t}: ±差 {checks['plus_minus']:.3e}, 参照差 {checks['oracle']}")
    return checks['matrix']


def detect_blowup(ctx: BAContext, span: int = 12, tol: float = 1e-9) -> Optional[float]:
    """
    最小的 t > 0 使 2at + A₁/α 落在格 (𝒜, ℬ) 上

    Returns:
        发散时刻；直线不经过格点（紧情形物理解）时为 None
    """
    c = ctx.curve
    u1 = ctx.u1
    scale = max(abs(c.Acal), abs(c.Bcal))
    best = None
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            gap = m * c.Acal + n * c.Bcal - u1
            if abs(gap.imag) > tol * scale:
                continue
            t = gap.real / (2.0 * c.a)
            if t > tol and (best is None or t < best):
                best = t
    if best is not None:
        logger.info(f"℘ 极点给出发散时刻 t* = {best:.12g}")
    return best
