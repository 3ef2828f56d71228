"""
运行指纹
对规范化 JSON 计算 SHA-256，用于判定两次运行输入是否一致
"""

import json

from Crypto.Hash import SHA256


def fingerprint(payload: dict) -> str:
    """
    计算字典内容的指纹

    Args:
        payload: 可 JSON 序列化的字典

    Returns:
        16 位大写十六进制指纹
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return SHA256.new(canonical.encode('utf-8')).hexdigest()[:16].upper()
