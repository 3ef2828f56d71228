"""
公共模块
提供异常体系、日志配置和运行指纹
"""

from .errors import SpinTopError
from .log import get_logger, setup_logging
from .fingerprint import fingerprint

__all__ = ['SpinTopError', 'get_logger', 'setup_logging', 'fingerprint']
