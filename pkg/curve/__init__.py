"""
谱曲线模块
椭圆谱曲线、周期、Abel 映射、第二类积分 Ω 与速度常数 V
"""

from .surface import (
    COMPACT, NONCOMPACT, VARIANTS, INF_MINUS, INF_PLUS, ZERO_MINUS, ZERO_PLUS,
    SurfacePoint, branch_points, branch_value, infinity_point, quartic, variant_rho, zero_point,
)
from .periods import A_CYCLE, B_CYCLE, CyclePath, a_cycle, adaptive_gauss, b_cycle, period
from .spectral import (
    FAULT_PERTURB_ACAL, CurveData, build_curve, lattice_coordinates, lattice_equal,
    lattice_reduce, mu, mu_pair, w,
)
from .abel import abel, abel_invert, marked_images, path_integral
from .omega import (
    expansion_at_infinity, expansion_closed_form, omega_of_z, omega_prime, omega_quadrature,
    omega_sk, v_constant, velocity_residuals,
)

__all__ = [
    'COMPACT', 'NONCOMPACT', 'VARIANTS', 'INF_MINUS', 'INF_PLUS', 'ZERO_MINUS', 'ZERO_PLUS',
    'SurfacePoint', 'branch_points', 'branch_value', 'infinity_point', 'quartic', 'variant_rho',
    'zero_point',
    'A_CYCLE', 'B_CYCLE', 'CyclePath', 'a_cycle', 'adaptive_gauss', 'b_cycle', 'period',
    'FAULT_PERTURB_ACAL', 'CurveData', 'build_curve', 'lattice_coordinates', 'lattice_equal',
    'lattice_reduce', 'mu', 'mu_pair', 'w',
    'abel', 'abel_invert', 'marked_images', 'path_integral',
    'expansion_at_infinity', 'expansion_closed_form', 'omega_of_z', 'omega_prime',
    'omega_quadrature', 'omega_sk', 'v_constant', 'velocity_residuals',
]
