"""
分解模块
由 BA 函数组装 g±，检验 e^{tL} 的规范分解、共轭演化与发散时刻
"""

from .factor import (
    CANONICAL, MINUS, NON_CANONICAL, PLUS,
    FactorizationReport, FactorPair, build_Phi, conjugation_residuals, default_contour,
    detect_blowup, evolve_by_conjugation, factor_pair, g_factor, verify_factorization,
)

__all__ = [
    'CANONICAL', 'MINUS', 'NON_CANONICAL', 'PLUS',
    'FactorizationReport', 'FactorPair', 'build_Phi', 'conjugation_residuals', 'default_contour',
    'detect_blowup', 'evolve_by_conjugation', 'factor_pair', 'g_factor', 'verify_factorization',
]
