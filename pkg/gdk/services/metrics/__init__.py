#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
生成版型与 GT 的评估指标
"""

from gdk.services.metrics.matching import MatchResult, exhaustive_match, match_panels
from gdk.services.metrics.report import EvalReport, aggregate, evaluate, format_table
from gdk.services.metrics.scores import (
    SampleMetrics,
    count_acc,
    evaluate_pair,
    panel_l2,
    placement_l2,
    stitch_prf,
)

__all__ = [
    "MatchResult",
    "exhaustive_match",
    "match_panels",
    "EvalReport",
    "aggregate",
    "evaluate",
    "format_table",
    "SampleMetrics",
    "count_acc",
    "evaluate_pair",
    "panel_l2",
    "placement_l2",
    "stitch_prf",
]
