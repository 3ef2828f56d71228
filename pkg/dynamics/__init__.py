"""
动力学模块
转子状态、Lax 矩阵、能量自检、RK4 参照轨道与矩阵指数
"""

from .state import RotatorState, modulus_ksq, omega_tilde, rotation_period
from .lax import (
    IDENTITY, SIGMA3, LaxSample, build_lax, commutator, exp_traceless, hamiltonian, hamiltonian_residual,
    lax_parts, matrix_exp, matrix_exp_taylor,
)
from .integrator import (
    BLOWUP_GUARD, LaxTrajectory, Trajectory, evolve_state, integrate_lax,
    integrate_phase, phase_at_times,
)

__all__ = [
    'RotatorState', 'modulus_ksq', 'omega_tilde', 'rotation_period',
    'IDENTITY', 'SIGMA3', 'LaxSample', 'build_lax', 'commutator', 'exp_traceless', 'hamiltonian',
    'hamiltonian_residual',
    'lax_parts', 'matrix_exp', 'matrix_exp_taylor',
    'BLOWUP_GUARD', 'LaxTrajectory', 'Trajectory', 'evolve_state', 'integrate_lax',
    'integrate_phase', 'phase_at_times',
]
