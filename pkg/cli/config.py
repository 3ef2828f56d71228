"""
运行配置
优先级：默认值 < 配置文件（JSON 或 INI） < 环境变量 < 命令行参数
"""

import configparser
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from common.errors import ConfigError
from common.fingerprint import fingerprint
from common.settings import Tolerances
from curve import COMPACT, VARIANTS, FAULT_PERTURB_ACAL, SurfacePoint
from dynamics import RotatorState

DEFAULT_ENERGY = 3.0

DEFAULT_TOLERANCES = Tolerances().to_dict()

FAULTS = (FAULT_PERTURB_ACAL,)
FORMATS = ("json", "csv")

# INI 节 -> (键, 字段)
_INI_LAYOUT = {
    'Model': [('variant', 'variant'), ('a', 'a'), ('energy', 'energy'),
              ('angle0', 'angle0'), ('momentum0', 'momentum0'), ('p1', 'p1')],
    'Time': [('t_max', 't_max'), ('t_steps', 't_steps')],
    'Contour': [('radius', 'contour_radius'), ('points', 'contour_points')],
    'Output': [('format', 'output_format'), ('out', 'out'), ('seed', 'seed'), ('workers', 'workers')],
}

_ENV_LAYOUT = {'SPINTOP_A': 'a', 'SPINTOP_ENERGY': 'energy', 'SPINTOP_VARIANT': 'variant'}


@dataclass
class RunConfig:
    """一次运行的全部参数"""

    # 模型
    variant: str = COMPACT
    a: float = 1.0
    energy: Optional[float] = None
    angle0: Optional[float] = None
    momentum0: Optional[float] = None
    p1: Optional[str] = None  # "re,im,sheet"

    # 时间网格，t_max = 0 表示紧情形一个周期、非紧情形 0.9·t*
    t_max: float = 0.0
    t_steps: int = 33

    # 围道
    contour_radius: float = 1.0
    contour_points: int = 64

    # 输出
    output_format: str = "json"
    out: Optional[str] = None
    seed: int = 0
    workers: int = 4
    inject_fault: Optional[str] = None

    # 扫描用能量网格
    energies: List[float] = field(default_factory=lambda: [1.5, 2.0, 3.0, 5.0, 10.0])

    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def uses_state(self) -> bool:
        return self.angle0 is not None or self.momentum0 is not None

    def validate(self) -> 'RunConfig':
        """
        检查不变量并补全缺省能量

        Raises:
            ConfigError: 参数非法
        """
        if self.variant not in VARIANTS:
            raise ConfigError(f"未知情形: {self.variant}")
        if not self.a > 0.0:
            raise ConfigError(f"耦合常数必须为正: a={self.a}")
        if self.t_steps < 2:
            raise ConfigError(f"t_steps 至少为 2: {self.t_steps}")
        if self.contour_points < 8:
            raise ConfigError(f"contour_points 至少为 8: {self.contour_points}")
        if not self.contour_radius > 0.0:
            raise ConfigError(f"围道半径必须为正: {self.contour_radius}")
        if self.t_max < 0.0:
            raise ConfigError(f"t_max 不能为负: {self.t_max}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"未知输出格式: {self.output_format}")
        if self.inject_fault is not None and self.inject_fault not in FAULTS:
            raise ConfigError(f"未知故障注入: {self.inject_fault}")
        if self.workers < 1:
            raise ConfigError(f"workers 至少为 1: {self.workers}")
        if self.uses_state:
            if self.angle0 is None or self.momentum0 is None:
                raise ConfigError("angle0 与 momentum0 必须同时给出")
            if self.energy is not None:
                raise ConfigError("能量与 (angle0, momentum0) 只能给出其一")
        elif self.energy is None:
            self.energy = DEFAULT_ENERGY
        Tolerances().update(self.tolerances)
        if self.p1 is not None:
            self.divisor_point()
        return self

    def initial_state(self) -> RotatorState:
        """初态：给出 (angle0, momentum0) 时直接使用，否则取角度 0、正动量"""
        if self.uses_state:
            return RotatorState(self.variant, self.a, self.angle0, self.momentum0)
        return RotatorState.from_energy(self.variant, self.a, self.energy, 0.0)

    def resolved_energy(self) -> float:
        return self.initial_state().energy

    def divisor_point(self) -> Optional[SurfacePoint]:
        """解析 --p1 "re,im,sheet" """
        if self.p1 is None:
            return None
        parts = [x.strip() for x in str(self.p1).split(',')]
        try:
            re_part, im_part = float(parts[0]), float(parts[1])
            sheet = int(parts[2]) if len(parts) > 2 else 1
        except (ValueError, IndexError):
            raise ConfigError(f"p1 格式应为 're,im,sheet': {self.p1}")
        if sheet not in (1, -1) or len(parts) > 3:
            raise ConfigError(f"p1 的叶号必须为 ±1: {self.p1}")
        return SurfacePoint(complex(re_part, im_part), sheet)

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def to_dict(self) -> dict:
        data = asdict(self)
        data['tolerances'] = dict(sorted(self.tolerances.items()))
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> 'RunConfig':
        config = cls()
        config.update(data)
        return config

    def update(self, data: Mapping) -> None:
        """按字段名覆盖，忽略值为 None 的项"""
        known = {f.name: f for f in fields(self)}
        for key, value in data.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"未知配置项: {key}")
            if key == 'tolerances':
                merged = dict(self.tolerances)
                merged.update({k: float(v) for k, v in value.items()})
                self.tolerances = merged
                continue
            setattr(self, key, _coerce(key, value))

    def fingerprint(self) -> str:
        return fingerprint(self.to_dict())


def _coerce(key: str, value):
    try:
        if key in ('a', 'energy', 'angle0', 'momentum0', 't_max', 'contour_radius'):
            return float(value)
        if key in ('t_steps', 'contour_points', 'seed', 'workers'):
            return int(value)
        if key == 'energies':
            if isinstance(value, str):
                return [float(x) for x in value.split(',') if x.strip()]
            return [float(x) for x in value]
    except (TypeError, ValueError):
        raise ConfigError(f"配置项 {key} 的值非法: {value!r}")
    return str(value)


def load_file(path: str) -> dict:
    """
    读取 JSON 或 INI 配置文件

    Raises:
        ConfigError: 文件不存在或格式错误
    """
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"配置文件不存在: {path}")
    if file.suffix.lower() == '.json':
        try:
            data = json.loads(file.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ConfigError(f"配置文件 JSON 解析失败: {e}")
        if not isinstance(data, dict):
            raise ConfigError("配置文件顶层必须是对象")
        return {key.replace('-', '_'): value for key, value in data.items()}

    parser = configparser.ConfigParser()
    try:
        parser.read(file, encoding='utf-8')
    except configparser.Error as e:
        raise ConfigError(f"配置文件 INI 解析失败: {e}")
    data = {}
    for section, keys in _INI_LAYOUT.items():
        if section in parser:
            for key, name in keys:
                if key in parser[section]:
                    data[name] = parser[section][key]
    if 'Tolerances' in parser:
        data['tolerances'] = {k: float(v) for k, v in parser['Tolerances'].items()}
    return data


def load_environment(environ: Mapping[str, str] = None) -> dict:
    environ = os.environ if environ is None else environ
    return {name: environ[key] for key, name in _ENV_LAYOUT.items() if environ.get(key)}


def resolve_config(flags: Mapping, config_path: Optional[str] = None,
                   environ: Mapping[str, str] = None) -> RunConfig:
    """
    合并各来源得到最终配置

    Args:
        flags: 命令行给出的字段（未给出的为 None）
        config_path: 配置文件路径
        environ: 环境变量表，缺省为 os.environ

    Returns:
        校验过的 RunConfig
    """
    config = RunConfig()
    if config_path:
        config.update(load_file(config_path))
    config.update(load_environment(environ))
    config.update(flags)
    # 命令行给出初态时，来自文件或环境的能量让位
    if flags.get('angle0') is not None and flags.get('energy') is None:
        config.energy = None
    return config.validate()
