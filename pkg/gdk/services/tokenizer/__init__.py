#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
版型 token 化：布局预设、归一化统计量、编解码与二进制格式
"""

from gdk.services.tokenizer.codec import DecodeReport, PatternCodec, TokenGrid
from gdk.services.tokenizer.layout import PRESETS, TokenLayout, get_layout
from gdk.services.tokenizer.stats import NormStats, compute_stats, load_stats, save_stats

__all__ = [
    "DecodeReport",
    "PatternCodec",
    "TokenGrid",
    "PRESETS",
    "TokenLayout",
    "get_layout",
    "NormStats",
    "compute_stats",
    "load_stats",
    "save_stats",
]
