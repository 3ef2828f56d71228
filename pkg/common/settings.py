"""
数值容差
全局唯一的一份容差表，各模块在调用时读取；命令行按配置临时覆盖
"""

from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from typing import Dict, Iterator, Mapping

from .errors import ConfigError


@dataclass
class Tolerances:
    """数值容差"""

    # theta 级数截断
    eps_theta: float = 1e-15
    # θ₁ 零点 / ℘ 极点判定
    eps_pole: float = 1e-10
    # 到分支点的最小距离
    eps_branch: float = 1e-8
    # 正则性裕度 |θ₁(A₁ + Vt)| / |θ₁′(0)| 的下限
    eps_canonical: float = 1e-6
    # 展开条件 (b) 的残差上限
    condition_b: float = 1e-6
    # 分解残差上限
    tol_fact: float = 1e-5
    # 条件数上限
    cond_max: float = 1e8
    # 实值解的虚部上限（相对）
    reality: float = 1e-9

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    def update(self, values: Mapping[str, float]) -> None:
        """
        按名称更新

        Raises:
            ConfigError: 未知名称或非正值
        """
        known = {f.name for f in fields(self)}
        for name, value in values.items():
            if name not in known:
                raise ConfigError(f"未知容差: {name}")
            value = float(value)
            if not value > 0.0:
                raise ConfigError(f"容差 {name} 必须为正，当前 {value}")
            setattr(self, name, value)


# 全局容差实例
tolerances = Tolerances()


@contextmanager
def override(values: Mapping[str, float]) -> Iterator[Tolerances]:
    """在 with 块内临时覆盖全局容差，退出时恢复"""
    saved = tolerances.to_dict()
    try:
        tolerances.update(values)
        yield tolerances
    finally:
        for name, value in saved.items():
            setattr(tolerances, name, value)
