"""
异常定义
所有数值管线错误都继承自 SpinTopError，kind 字段写入报告
"""

from typing import Optional, Tuple


class SpinTopError(ValueError):
    """管线错误基类"""

    kind = "error"

    def __init__(self, message: str, kind: Optional[str] = None):
        super().__init__(message)
        if kind:
            self.kind = kind

    def to_dict(self) -> dict:
        """转换为报告中的错误字典"""
        return {'success': False, 'error': str(self), 'kind': self.kind}


class ModulusError(SpinTopError):
    """模参数非法（Im τ ≤ 0 或 k² 越界）"""
    kind = "modulus-invalid"


class ThetaOverflowError(SpinTopError):
    """格点平移后 theta 级数仍然溢出"""
    kind = "overflow"


class PoleError(SpinTopError):
    """在极点附近求值"""
    kind = "pole-at-lattice-point"


class RegimeError(SpinTopError):
    """能量区间不受 theta 管线支持"""
    kind = "regime-unsupported"


class QuadratureError(SpinTopError):
    """数值积分或外推不收敛"""
    kind = "quadrature-nonconvergence"


class LambdaZeroError(SpinTopError):
    """谱参数 λ = 0"""
    kind = "lambda-zero"


class DegenerateDivisorError(SpinTopError):
    """除子点退化（落在分支点或 θ₁ 值下溢）"""
    kind = "degenerate-divisor"


class CanonicalWindowError(SpinTopError):
    """θ₁(A₁ + Vt) 趋于零，超出规范分解窗口"""
    kind = "canonical-window-violated"


class IllConditionedError(SpinTopError):
    """Φ±(λ, 0) 条件数过大"""
    kind = "ill-conditioned-basis"


class IdentityViolation(SpinTopError):
    """强制自检失败"""
    kind = "identity-violation"


class ConfigError(SpinTopError):
    """运行配置非法"""
    kind = "config-invalid"


class BlowUpDetected(SpinTopError):
    """非紧情形轨道在有限时间发散"""

    kind = "blow-up-detected"

    def __init__(self, message: str, bracket: Tuple[float, float], trajectory=None):
        super().__init__(message)
        self.bracket = bracket
        self.trajectory = trajectory

    @property
    def blowup_time(self) -> float:
        """发散时间估计（区间中点）"""
        return 0.5 * (self.bracket[0] + self.bracket[1])
