"""
报告输出
JSON 与 CSV，浮点数一律 17 位有效数字
"""

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _json_value(value, indent: int, level: int) -> str:
    pad = ' ' * (indent * (level + 1))
    close = ' ' * (indent * level)
    if value is None:
        return 'null'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value) if math.isfinite(value) else 'null'
    if isinstance(value, (complex, np.complexfloating)):
        return _json_value([value.real, value.imag], indent, level)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_json_value(v, indent, level + 1)}"
                 for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + close + '}'
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return '[]'
        items = [f"{pad}{_json_value(v, indent, level + 1)}" for v in value]
        return '[\n' + ',\n'.join(items) + '\n' + close + ']'
    raise TypeError(f"无法序列化的类型: {type(value).__name__}")


def to_json(payload: dict, indent: int = 2) -> str:
    """确定性 JSON：保持键顺序，浮点 17 位有效数字，非有限值写 null"""
    return _json_value(payload, indent, 0) + '\n'


def to_csv(columns: Sequence[str], rows: Iterable[Sequence], comments: Optional[dict] = None) -> str:
    """CSV 文本，comments 以 '# key=value' 行写在表头之前"""
    buffer = io.StringIO()
    for key, value in (comments or {}).items():
        text = 'null' if value is None else (format_float(value) if isinstance(value, float) else value)
        buffer.write(f"# {key}={text}\n")
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow(['' if v is None else (format_float(v) if isinstance(v, (float, np.floating)) else v)
                         for v in row])
    return buffer.getvalue()


def emit(text: str, out: Optional[str] = None) -> None:
    """写入文件或 stdout"""
    if out:
        Path(out).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
