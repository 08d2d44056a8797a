#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
JSON 工具模块，提供字节稳定的数字格式化与序列化
"""

import json
import math
from typing import Any

SIGNIFICANT_DIGITS = 9


def round_sig(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """
    保留指定位数的有效数字

    Args:
        value: 原始数值
        digits: 有效数字位数，默认为 9

    Returns:
        float: 舍入后的数值；-0.0 归一为 0.0
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"无法序列化非有限数值: {value}")
    rounded = float(f"{value:.{digits}g}")
    return 0.0 if rounded == 0 else rounded


def dumps_canonical(obj: Any) -> str:
    """按插入顺序输出缩进 JSON，末尾带换行"""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
