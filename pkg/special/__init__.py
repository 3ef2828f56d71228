"""
特殊函数模块
亏格 1 theta 函数、Weierstrass ℘、Jacobi 椭圆函数与椭圆积分
"""

from .theta import (
    ThetaModulus,
    theta, theta1, theta1_derivative, theta1_dlog,
)
from .weierstrass import WeierstrassLattice, wp, wp_prime, wp_lattice_sum
from .jacobi import (
    EllipticModulus, agm, cubic_invariants, elliptic_F, elliptic_K,
    jacobi_sn, jacobi_sncndn, u0_integral,
)

__all__ = [
    'ThetaModulus',
    'theta', 'theta1', 'theta1_derivative', 'theta1_dlog',
    'WeierstrassLattice', 'wp', 'wp_prime', 'wp_lattice_sum',
    'EllipticModulus', 'agm', 'cubic_invariants', 'elliptic_F', 'elliptic_K',
    'jacobi_sn', 'jacobi_sncndn', 'u0_integral',
]
