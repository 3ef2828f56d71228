"""
日志配置
输出格式沿用 [组件] 前缀，级别由环境变量 SPINTOP_LOG 控制
"""

import logging
import os
import sys

LOG_ENV = "SPINTOP_LOG"
LOG_FORMAT = "[%(name)s] %(message)s"

_configured = False


def setup_logging(level: str = None) -> None:
    """
    配置根日志器（只生效一次）

    Args:
        level: 日志级别名称，缺省时读取 SPINTOP_LOG，再缺省为 WARNING
    """
    global _configured
    name = (level or os.environ.get(LOG_ENV, "WARNING")).upper()
    resolved = getattr(logging, name, None)
    if not isinstance(resolved, int):
        resolved = logging.WARNING

    root = logging.getLogger()
    if not _configured:
        # 报告写 stdout，日志只写 stderr
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        _configured = True
    root.setLevel(resolved)


def get_logger(component: str) -> logging.Logger:
    """按组件名获取日志器"""
    return logging.getLogger(component)
