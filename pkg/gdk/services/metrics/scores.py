#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.metrics.scores

单样本评估指标。调用方传入的两个版型先各自规范化（摆放到三维再由
``recover_placement`` 重新表达），然后匹配、逐项打分。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Set, Tuple

import numpy as np

from gdk.services.metrics.matching import MatchResult, centered_vertices, match_panels
from gdk.services.pattern.geometry import canonicalize_panel
from gdk.services.pattern.model import Pattern

EdgeKey = Tuple[Tuple[int, int], Tuple[int, int]]
Matcher = Callable[[Pattern, Pattern], MatchResult]


@dataclass(frozen=True)
class CanonicalPattern:
    pattern: Pattern
    degenerate: Tuple[bool, ...]


@dataclass
class SampleMetrics:
    """一个 (预测, GT) 样本的指标；没有匹配对时 L2 类指标为 None"""

    panel_l2: Optional[float]
    num_panel_acc: float
    num_edge_acc: float
    rot_l2: Optional[float]
    trans_l2: Optional[float]
    stitch_precision: float
    stitch_recall: float
    stitch_f1: float
    n_pairs: int
    n_degenerate: int


def canonicalize(pattern: Pattern) -> CanonicalPattern:
    if not pattern.panels:
        return CanonicalPattern(pattern=pattern, degenerate=())
    results = [canonicalize_panel(p) for p in pattern.panels]
    canonical = Pattern(
        name=pattern.name, panels=[p for p, _ in results], stitches=list(pattern.stitches)
    )
    return CanonicalPattern(pattern=canonical, degenerate=tuple(d for _, d in results))


def panel_pair_l2(pred_pts: np.ndarray, gt_pts: np.ndarray, shift: int) -> float:
    """对齐后较短边环上的顶点距离之和 + 每个缺失顶点一个 GT 包围盒对角线"""
    m = min(len(pred_pts), len(gt_pts))
    rolled = np.roll(pred_pts, -shift, axis=0)[:m]
    total = float(np.linalg.norm(rolled - gt_pts[:m], axis=1).sum())
    missing = abs(len(pred_pts) - len(gt_pts))
    if missing:
        diag = float(np.linalg.norm(gt_pts.max(axis=0) - gt_pts.min(axis=0)))
        total += missing * diag
    return total


def panel_l2(pred: Pattern, gt: Pattern, matching: MatchResult) -> Optional[float]:
    if not matching.pairs:
        return None
    values = [
        panel_pair_l2(
            centered_vertices(pred.panels[i]),
            centered_vertices(gt.panels[j]),
            matching.alignments[(i, j)].shift,
        )
        for i, j in matching.pairs
    ]
    return float(np.mean(values))


def count_acc(pred: Pattern, gt: Pattern, matching: MatchResult) -> Tuple[float, float]:
    panel_acc = 1.0 if len(pred.panels) == len(gt.panels) else 0.0
    if not matching.pairs:
        edge_acc = 1.0 if not pred.panels and not gt.panels else 0.0
        return panel_acc, edge_acc
    same = sum(len(pred.panels[i].edges) == len(gt.panels[j].edges) for i, j in matching.pairs)
    return panel_acc, same / len(matching.pairs)


def angle_l2(a_deg, b_deg) -> float:
    """逐角取环绕差 min(|Δ|, 2π − |Δ|)，返回弧度下的 L2"""
    delta = np.abs(np.deg2rad(np.asarray(a_deg, dtype=np.float64) - np.asarray(b_deg, dtype=np.float64)))
    delta = np.mod(delta, 2 * np.pi)
    wrapped = np.minimum(delta, 2 * np.pi - delta)
    return float(np.linalg.norm(wrapped))


def placement_l2(
    pred: CanonicalPattern, gt: CanonicalPattern, matching: MatchResult
) -> Tuple[Optional[float], Optional[float], int]:
    """(rot_l2, trans_l2, 被排除的退化对数)"""
    rots: List[float] = []
    trans: List[float] = []
    excluded = 0
    for i, j in matching.pairs:
        if pred.degenerate[i] or gt.degenerate[j]:
            excluded += 1
            continue
        pp, gp = pred.pattern.panels[i], gt.pattern.panels[j]
        rots.append(angle_l2(pp.rotation, gp.rotation))
        trans.append(float(np.linalg.norm(np.subtract(pp.translation, gp.translation))))
    if not rots:
        return None, None, excluded
    return float(np.mean(rots)), float(np.mean(trans)), excluded


def mapped_stitches(pred: Pattern, matching: MatchResult) -> List[Optional[EdgeKey]]:
    """预测缝合经匹配与循环对齐翻译为 GT 编号；无法翻译的记 None"""
    to_gt = matching.pred_to_gt()
    out: List[Optional[EdgeKey]] = []
    for stitch in pred.stitches:
        refs = []
        for p_idx, e_idx in (stitch.first, stitch.second):
            g_idx = to_gt.get(p_idx)
            g_edge = None if g_idx is None else matching.alignments[(p_idx, g_idx)].gt_edge(e_idx)
            refs.append(None if g_edge is None else (g_idx, g_edge))
        if None in refs:
            out.append(None)
        else:
            a, b = refs
            out.append((a, b) if a <= b else (b, a))
    return out


def stitch_prf(pred: Pattern, gt: Pattern, matching: MatchResult) -> Tuple[float, float, float]:
    gt_set: Set[EdgeKey] = gt.stitch_set()
    mapped = mapped_stitches(pred, matching)
    n_pred, n_gt = len(mapped), len(gt_set)
    tp = len({m for m in mapped if m is not None} & gt_set)
    if n_pred == 0:
        precision = 1.0 if n_gt == 0 else 0.0
    else:
        precision = tp / n_pred
    recall = 1.0 if n_gt == 0 else tp / n_gt
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def evaluate_pair(pred: Pattern, gt: Pattern, matcher: Matcher = match_panels) -> SampleMetrics:
    """matcher 默认为匈牙利匹配；传入 exhaustive_match 即得到穷举参照下的同一组指标"""
    cp, cg = canonicalize(pred), canonicalize(gt)
    matching = matcher(cp.pattern, cg.pattern)
    panel_acc, edge_acc = count_acc(cp.pattern, cg.pattern, matching)
    rot, trans, excluded = placement_l2(cp, cg, matching)
    precision, recall, f1 = stitch_prf(cp.pattern, cg.pattern, matching)
    return SampleMetrics(
        panel_l2=panel_l2(cp.pattern, cg.pattern, matching),
        num_panel_acc=panel_acc,
        num_edge_acc=edge_acc,
        rot_l2=rot,
        trans_l2=trans,
        stitch_precision=precision,
        stitch_recall=recall,
        stitch_f1=f1,
        n_pairs=len(matching.pairs),
        n_degenerate=excluded,
    )


__all__ = [
    "CanonicalPattern",
    "SampleMetrics",
    "canonicalize",
    "panel_pair_l2",
    "panel_l2",
    "count_acc",
    "angle_l2",
    "placement_l2",
    "mapped_stitches",
    "stitch_prf",
    "evaluate_pair",
]
