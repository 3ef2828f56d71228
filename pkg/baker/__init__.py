"""
Baker-Akhiezer 模块
theta 函数形式的 BA 函数、∞ 处展开、恒等式校验与闭式解
"""

from .context import (
    BAContext, build_context, check_condition_b, default_context, default_divisor, physical_divisor,
)
from .functions import (
    ba_minus, ba_minus_z, ba_plus, canonical_margin, check_cosid, check_sinid,
    expansion_coeffs, gamma_j, leading_coefficient, offdiag_value, richardson, time_scale,
)
from .solutions import (
    additive_constants, analytic_constant, solution_sin2, solution_sin2_theta, solution_sinh2,
    solution_sinh2_theta, solution_sn, theta_route, wp_phase, wp_route,
)

__all__ = [
    'BAContext', 'build_context', 'check_condition_b', 'default_context', 'default_divisor',
    'physical_divisor',
    'ba_minus', 'ba_minus_z', 'ba_plus', 'canonical_margin', 'check_cosid',
    'check_sinid', 'expansion_coeffs', 'gamma_j', 'leading_coefficient', 'offdiag_value',
    'richardson', 'time_scale',
    'additive_constants', 'analytic_constant', 'solution_sin2', 'solution_sin2_theta',
    'solution_sinh2', 'solution_sinh2_theta', 'solution_sn', 'theta_route', 'wp_phase', 'wp_route',
]
