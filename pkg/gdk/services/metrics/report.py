#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""评估报告：样本指标的聚合、JSON 与对齐文本表"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from gdk.services.metrics.scores import SampleMetrics, evaluate_pair
from gdk.services.pattern.model import Pattern
from gdk.utils.json_utils import dumps_canonical, round_sig

# (表头, 字段名)
COLUMNS: Tuple[Tuple[str, str], ...] = (
    ("Panel L2", "panel_l2"),
    ("#Panel Acc", "num_panel_acc"),
    ("#Edge Acc", "num_edge_acc"),
    ("Rot L2", "rot_l2"),
    ("Trans L2", "trans_l2"),
    ("Stitch Prec", "stitch_precision"),
    ("Stitch Rec", "stitch_recall"),
    ("Stitch F1", "stitch_f1"),
)


class EvalReport(BaseModel):
    """跨样本平均的评估结果；L2 类指标在没有任何匹配对时为 None"""

    label: str = ""
    panel_l2: Optional[float] = Field(None, ge=0, description="厘米")
    num_panel_acc: float = Field(0.0, ge=0, le=1)
    num_edge_acc: float = Field(0.0, ge=0, le=1)
    rot_l2: Optional[float] = Field(None, ge=0, description="弧度")
    trans_l2: Optional[float] = Field(None, ge=0, description="厘米")
    stitch_precision: float = Field(0.0, ge=0, le=1)
    stitch_recall: float = Field(0.0, ge=0, le=1)
    stitch_f1: float = Field(0.0, ge=0, le=1)
    n_samples: int = 0
    n_degenerate: int = 0

    def to_json(self) -> str:
        data = {k: (round_sig(v) if isinstance(v, float) else v) for k, v in self.model_dump().items()}
        return dumps_canonical(data)

    def to_table(self) -> str:
        return format_table([self])


def _mean(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def aggregate(samples: Sequence[SampleMetrics], label: str = "") -> EvalReport:
    """先对样本内的匹配对求平均，再对样本求平均"""
    if not samples:
        return EvalReport(label=label)
    return EvalReport(
        label=label,
        panel_l2=_mean(s.panel_l2 for s in samples),
        num_panel_acc=float(np.mean([s.num_panel_acc for s in samples])),
        num_edge_acc=float(np.mean([s.num_edge_acc for s in samples])),
        rot_l2=_mean(s.rot_l2 for s in samples),
        trans_l2=_mean(s.trans_l2 for s in samples),
        stitch_precision=float(np.mean([s.stitch_precision for s in samples])),
        stitch_recall=float(np.mean([s.stitch_recall for s in samples])),
        stitch_f1=float(np.mean([s.stitch_f1 for s in samples])),
        n_samples=len(samples),
        n_degenerate=int(sum(s.n_degenerate for s in samples)),
    )


def evaluate(
    pairs: Sequence[Tuple[Pattern, Pattern]], label: str = "", threads: int = 1
) -> EvalReport:
    """(预测, GT) 列表 → 报告；多线程时按输入顺序归约"""
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples: List[SampleMetrics] = list(pool.map(lambda pg: evaluate_pair(*pg), pairs))
    else:
        samples = [evaluate_pair(pred, gt) for pred, gt in pairs]
    return aggregate(samples, label)


def _cell(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def format_table(reports: Sequence[EvalReport]) -> str:
    headers = ["Run"] + [h for h, _ in COLUMNS] + ["N"]
    rows = [
        [r.label or "-"] + [_cell(getattr(r, f)) for _, f in COLUMNS] + [str(r.n_samples)]
        for r in reports
    ]
    widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in [headers] + rows]
    return "\n".join(lines) + "\n"


__all__ = ["EvalReport", "COLUMNS", "aggregate", "evaluate", "format_table"]
