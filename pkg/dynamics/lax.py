"""
Lax 矩阵
L(λ) = aλσ₃ + 𝐥 + 𝐬λ⁻¹，M₊ = 𝐥 + aλσ₃，M₋ = -𝐬λ⁻¹，dL/dt = [L, M±]
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from common.errors import IdentityViolation, LambdaZeroError
from common.log import get_logger
from curve.surface import COMPACT
from .state import RotatorState

logger = get_logger("Integrator")

SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

HAMILTONIAN_TOL = 1e-10
_RESIDUE_SAMPLES = 8
_SMALL_ARGUMENT = 1e-6


@dataclass(frozen=True)
class LaxSample:
    """某个 λ 处的 L, M₊, M₋"""

    lam: complex
    L: np.ndarray
    Mplus: np.ndarray
    Mminus: np.ndarray


def lax_parts(state: RotatorState) -> Tuple[np.ndarray, np.ndarray]:
    """
    λ⁰ 部分 𝐥 与 λ⁻¹ 部分 𝐬

    紧情形 𝐥 = [[0, l], [-l, 0]]，𝐬 = a[[cos2φ, sin2φ], [sin2φ, -cos2φ]]；
    非紧情形 l = iq̇，𝐬 = [[-a cosh2q, -ia sinh2q], [-ia sinh2q, a cosh2q]]
    """
    a = state.a
    if state.variant == COMPACT:
        l = complex(state.momentum)
        c, s = math.cos(2.0 * state.angle), math.sin(2.0 * state.angle)
        s_mat = a * np.array([[c, s], [s, -c]], dtype=complex)
    else:
        l = 1j * state.momentum
        c, s = math.cosh(2.0 * state.angle), math.sinh(2.0 * state.angle)
        s_mat = a * np.array([[-c, -1j * s], [-1j * s, c]], dtype=complex)
    l_mat = np.array([[0.0, l], [-l, 0.0]], dtype=complex)
    return l_mat, s_mat


def build_lax(state: RotatorState, lam: complex) -> LaxSample:
    """
    组装 L(λ) 及 R-矩阵投影 M±

    Raises:
        LambdaZeroError: λ = 0
    """
    lam = complex(lam)
    if lam == 0:
        raise LambdaZeroError("谱参数 λ 不能为零")
    l_mat, s_mat = lax_parts(state)
    mplus = l_mat + state.a * lam * SIGMA3
    mminus = -s_mat / lam
    return LaxSample(lam, mplus - mminus, mplus, mminus)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def hamiltonian(state: RotatorState, check: bool = True) -> float:
    """
    能量 E，并以 Lax 矩阵的留数形式自检

    tr L² 的 λ⁰ 系数 c₀ 由单位圆上的梯形平均得到，
    紧情形 E = -¼c₀，非紧情形 E = ¼c₀

    Raises:
        IdentityViolation: 两种算法相差超过 1e-10（相对）
    """
    energy = state.energy
    if not check:
        return energy
    error = hamiltonian_residual(state)
    logger.debug(f"能量留数自检: E={energy:.15g}, 残差={error:.3e}")
    if error > HAMILTONIAN_TOL * max(1.0, abs(energy)):
        raise IdentityViolation(f"留数形式能量与 H 不符: 残差 {error:.3e}")
    return energy


def hamiltonian_residual(state: RotatorState) -> float:
    """|-¼·sign·c₀ - E| 加上 c₀ 的虚部，c₀ 为 tr L² 的 λ⁰ 系数"""
    angles = 2.0 * math.pi * np.arange(_RESIDUE_SAMPLES) / _RESIDUE_SAMPLES
    traces = [np.trace(np.linalg.matrix_power(build_lax(state, np.exp(1j * t)).L, 2)) for t in angles]
    c0 = complex(np.mean(traces))
    sign = 1.0 if state.variant == COMPACT else -1.0
    return abs(-0.25 * sign * c0.real - state.energy) + abs(c0.imag)


def matrix_exp(state: RotatorState, lam: complex, t: float) -> np.ndarray:
    """
    e^{tL(λ)} = cosh(tμ)I + sinh(tμ)/μ·L，μ² = -det L

    |tμ| < 1e-6 时改用三项 Taylor 展开
    """
    L = build_lax(state, lam).L
    return exp_traceless(L, t)


def exp_traceless(L: np.ndarray, t: float) -> np.ndarray:
    """无迹 2×2 矩阵的指数"""
    mu = np.sqrt(complex(-np.linalg.det(L)))
    x = t * mu
    if abs(x) < _SMALL_ARGUMENT:
        x2 = x * x
        return (1.0 + x2 / 2.0 + x2 * x2 / 24.0) * IDENTITY + t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0) * L
    return np.cosh(x) * IDENTITY + (np.sinh(x) / mu) * L


def matrix_exp_taylor(L: np.ndarray, t: float, terms: int = 30) -> np.ndarray:
    """缩放-平方 Taylor 级数，独立于闭式的参照实现"""
    X = t * np.asarray(L, dtype=complex)
    norm = np.linalg.norm(X, 1)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    X = X / (2 ** squarings)
    result = IDENTITY.copy()
    term = IDENTITY.copy()
    for n in range(1, terms + 1):
        term = term @ X / n
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result
