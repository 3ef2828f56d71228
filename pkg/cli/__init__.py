"""
命令行模块
运行配置、子命令、检验套件与报告输出
"""

from .config import RunConfig, resolve_config
from .commands import COMMANDS, CommandResult

__all__ = ['RunConfig', 'resolve_config', 'COMMANDS', 'CommandResult']
