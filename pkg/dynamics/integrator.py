"""
时间演化参照解
相空间 RK4（φ̈ = -2a²sin2φ 或 q̈ = 2a²sinh2q）与 Lax 方程 dL/dt = [L, M₊] 的 RK4
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from common.errors import BlowUpDetected
from common.log import get_logger
from curve.surface import COMPACT
from .lax import build_lax, commutator
from .state import RotatorState

logger = get_logger("Integrator")

BLOWUP_GUARD = 25.0
# 非紧情形每步 |Δq| 的上限
_MAX_ANGLE_STEP = 0.01
_BISECTION_STEPS = 60


@dataclass
class Trajectory:
    """采样轨道 (t, angle, momentum)"""

    variant: str
    a: float
    times: List[float] = field(default_factory=list)
    angles: List[float] = field(default_factory=list)
    momenta: List[float] = field(default_factory=list)

    def append(self, t: float, angle: float, momentum: float) -> None:
        self.times.append(t)
        self.angles.append(angle)
        self.momenta.append(momentum)

    def state(self, i: int) -> RotatorState:
        return RotatorState(self.variant, self.a, self.angles[i], self.momenta[i], self.times[i])

    @property
    def final(self) -> RotatorState:
        return self.state(-1)

    def sin2(self) -> np.ndarray:
        """紧情形 sin²φ，非紧情形 sinh²q"""
        x = np.asarray(self.angles)
        return np.sin(x) ** 2 if self.variant == COMPACT else np.sinh(x) ** 2

    def to_dict(self) -> dict:
        return {'t': list(self.times), 'angle': list(self.angles), 'momentum': list(self.momenta)}


def _rhs(state: RotatorState) -> Callable[[np.ndarray], np.ndarray]:
    a2 = state.a * state.a
    if state.variant == COMPACT:
        return lambda y: np.array([y[1], -2.0 * a2 * math.sin(2.0 * y[0])])
    return lambda y: np.array([y[1], 2.0 * a2 * math.sinh(2.0 * y[0])])


def _rk4_step(f, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _blowup_tail(q: float, a: float) -> float:
    # q 很大时 q̇ ≈ a·e^{|q|}，剩余时间 ≈ e^{-|q|}/a
    return math.exp(-abs(q)) / a


def _march(state: RotatorState, y: np.ndarray, t0: float, t1: float, h: float,
           trajectory: Trajectory) -> np.ndarray:
    """
    从 t0 积分到 t1，步长不超过 h（非紧情形另受 |Δq| 限制）

    Raises:
        BlowUpDetected: |q| 越过 BLOWUP_GUARD
    """
    f = _rhs(state)
    t = t0
    compact = state.variant == COMPACT
    while t < t1 - 1e-15 * max(1.0, abs(t1)):
        step = min(h, t1 - t)
        if not compact:
            step = min(step, _MAX_ANGLE_STEP / max(abs(y[1]), 1e-300))
        y_next = _rk4_step(f, y, step)
        if not compact and abs(y_next[0]) > BLOWUP_GUARD:
            lo, hi = 0.0, step
            for _ in range(_BISECTION_STEPS):
                mid = 0.5 * (lo + hi)
                if abs(_rk4_step(f, y, mid)[0]) > BLOWUP_GUARD:
                    hi = mid
                else:
                    lo = mid
            crossing = t + hi
            tail = _blowup_tail(BLOWUP_GUARD, state.a)
            bracket = (crossing, crossing + 2.0 * tail)
            logger.info(f"检测到有限时间发散: t* ≈ {crossing + tail:.12g}")
            raise BlowUpDetected(f"轨道在 t ≈ {crossing + tail:.12g} 发散", bracket, trajectory)
        y = y_next
        t += step
    return y


def integrate_phase(state0: RotatorState, T: float, h: float) -> Trajectory:
    """
    经典四阶 Runge–Kutta 积分相空间方程，记录每个 h 步

    Args:
        state0: 初态
        T: 积分时长
        h: 步长（> 0）

    Returns:
        Trajectory

    Raises:
        BlowUpDetected: 非紧情形在 T 之前发散，bracket 为发散时间区间
    """
    if not h > 0.0:
        raise ValueError(f"步长必须为正: h={h}")
    steps = max(1, int(math.ceil(T / h - 1e-9)))
    grid = np.linspace(state0.t, state0.t + T, steps + 1)
    return phase_at_times(state0, grid, h)


def phase_at_times(state0: RotatorState, times: Sequence[float], h: float) -> Trajectory:
    """在给定（递增）时刻采样 RK4 轨道"""
    trajectory = Trajectory(state0.variant, state0.a)
    y = np.array([state0.angle, state0.momentum], dtype=float)
    t = state0.t
    for target in times:
        if target < t - 1e-12:
            raise ValueError("采样时刻必须递增")
        y = _march(state0, y, t, float(target), h, trajectory)
        t = float(target)
        trajectory.append(t, float(y[0]), float(y[1]))
    return trajectory


def evolve_state(state0: RotatorState, t: float, h: float) -> RotatorState:
    """把初态推进到 state0.t + t"""
    return phase_at_times(state0, [state0.t + t], h).final


@dataclass
class LaxTrajectory:
    """L(λ, t) 的采样"""

    lam: complex
    times: List[float] = field(default_factory=list)
    matrices: List[np.ndarray] = field(default_factory=list)
    states: List[RotatorState] = field(default_factory=list)


def integrate_lax(state0: RotatorState, lam: complex, T: float, h: float) -> LaxTrajectory:
    """
    RK4 同时积分相空间与矩阵方程 dL/dt = [L, M₊]，M₊ 由同步演化的状态重建

    Raises:
        LambdaZeroError: λ = 0
    """
    if not h > 0.0:
        raise ValueError(f"步长必须为正: h={h}")
    lam = complex(lam)
    f_phase = _rhs(state0)
    a = state0.a

    def mplus(y: np.ndarray) -> np.ndarray:
        return build_lax(state0.advanced(float(y[0]), float(y[1]), 0.0), lam).Mplus

    def f(y: np.ndarray, L: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return f_phase(y), commutator(L, mplus(y))

    y = np.array([state0.angle, state0.momentum], dtype=float)
    L = build_lax(state0, lam).L
    result = LaxTrajectory(lam, [state0.t], [L.copy()], [state0])
    steps = max(1, int(math.ceil(T / h - 1e-9)))
    dt = T / steps
    t = state0.t
    for _ in range(steps):
        k1y, k1L = f(y, L)
        k2y, k2L = f(y + 0.5 * dt * k1y, L + 0.5 * dt * k1L)
        k3y, k3L = f(y + 0.5 * dt * k2y, L + 0.5 * dt * k2L)
        k4y, k4L = f(y + dt * k3y, L + dt * k3L)
        y = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        L = L + (dt / 6.0) * (k1L + 2.0 * k2L + 2.0 * k3L + k4L)
        t += dt
        result.times.append(t)
        result.matrices.append(L.copy())
        result.states.append(state0.advanced(float(y[0]), float(y[1]), t))
    logger.debug(f"Lax 积分完成: λ={lam}, {steps} 步, a={a}")
    return result
