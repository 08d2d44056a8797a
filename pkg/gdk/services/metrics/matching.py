#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.metrics.matching

预测面片与 GT 面片的对应关系。

两个面片的对齐：顶点各自平移到质心，在预测边环的 n 个循环起点中取顶点 L2 之和最小者；
顶点数不同时只比较较短的前缀。匈牙利代价 = 对齐后的顶点 L2 之和 + 1000 × |边数差|。
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from gdk.services.pattern.model import Panel, Pattern

EDGE_COUNT_PENALTY = 1000.0
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class PanelAlignment:
    """一对面片的最佳循环对齐"""

    vertex_l2: float  # 较短边环上逐顶点距离之和
    shift: int  # 预测顶点 (i + shift) mod n_pred 对应 GT 顶点 i
    n_pred: int
    n_gt: int

    @property
    def cost(self) -> float:
        return self.vertex_l2 + EDGE_COUNT_PENALTY * abs(self.n_pred - self.n_gt)

    def gt_edge(self, pred_edge: int) -> Optional[int]:
        """预测边号 → GT 边号；落在较长边环的多余部分时返回 None"""
        idx = (pred_edge - self.shift) % self.n_pred
        return idx if idx < min(self.n_pred, self.n_gt) else None


@dataclass
class MatchResult:
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    alignments: Dict[Tuple[int, int], PanelAlignment] = field(default_factory=dict)
    unmatched_pred: List[int] = field(default_factory=list)
    unmatched_gt: List[int] = field(default_factory=list)

    @property
    def total_cost(self) -> float:
        return float(sum(self.alignments[p].cost for p in self.pairs))

    def pred_to_gt(self) -> Dict[int, int]:
        return dict(self.pairs)


def centered_vertices(panel: Panel) -> np.ndarray:
    pts = np.asarray(panel.vertices(), dtype=np.float64)
    return pts - pts.mean(axis=0)


def align_panels(pred: Panel, gt: Panel) -> PanelAlignment:
    p, g = centered_vertices(pred), centered_vertices(gt)
    n_p, n_g = len(p), len(g)
    m = min(n_p, n_g)
    best_sum, best_shift = np.inf, 0
    for k in range(n_p):
        rolled = np.roll(p, -k, axis=0)[:m]
        total = float(np.linalg.norm(rolled - g[:m], axis=1).sum())
        if total < best_sum:
            best_sum, best_shift = total, k
    return PanelAlignment(vertex_l2=best_sum, shift=best_shift, n_pred=n_p, n_gt=n_g)


def alignment_table(pred: Pattern, gt: Pattern) -> Dict[Tuple[int, int], PanelAlignment]:
    return {
        (i, j): align_panels(pp, gp)
        for i, pp in enumerate(pred.panels)
        for j, gp in enumerate(gt.panels)
    }


def _result(pairs, table, n_pred: int, n_gt: int) -> MatchResult:
    pairs = sorted((int(i), int(j)) for i, j in pairs)
    used_p = {i for i, _ in pairs}
    used_g = {j for _, j in pairs}
    return MatchResult(
        pairs=pairs,
        alignments={pair: table[pair] for pair in pairs},
        unmatched_pred=[i for i in range(n_pred) if i not in used_p],
        unmatched_gt=[j for j in range(n_gt) if j not in used_g],
    )


def _optimal_cost(cost: np.ndarray) -> float:
    if cost.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def _tie_tol(best: float) -> float:
    return TIE_RTOL * max(1.0, abs(best))


def _lexicographic_optimum(cost: np.ndarray) -> List[Tuple[int, int]]:
    """代价最小的分配中排序后字典序最小的一组

    逐个预测面片按 GT 编号从小到大尝试固定配对，固定后剩余子问题的最优代价加上已固定部分
    仍等于全局最优（容差内）即接受；全部失败说明该预测面片在最优解中不参与匹配。
    """
    best = _optimal_cost(cost)
    tol = _tie_tol(best)
    free_rows = list(range(cost.shape[0]))
    free_cols = list(range(cost.shape[1]))
    pairs: List[Tuple[int, int]] = []
    pinned = 0.0
    for i in range(cost.shape[0]):
        free_rows.remove(i)
        if not free_cols:
            break
        for j in list(free_cols):
            rest = [c for c in free_cols if c != j]
            total = pinned + cost[i, j] + _optimal_cost(cost[np.ix_(free_rows, rest)])
            if total <= best + tol:
                pairs.append((i, j))
                pinned += cost[i, j]
                free_cols = rest
                break
    return pairs


def match_panels(pred: Pattern, gt: Pattern) -> MatchResult:
    """最小代价二分匹配（scipy 匈牙利算法，支持矩形代价矩阵）

    等代价的分配取排序后字典序最小者，与 exhaustive_match 的选择一致。
    """
    n_p, n_g = len(pred.panels), len(gt.panels)
    if n_p == 0 or n_g == 0:
        return _result([], {}, n_p, n_g)
    table = alignment_table(pred, gt)
    cost = np.array([[table[(i, j)].cost for j in range(n_g)] for i in range(n_p)])
    return _result(_lexicographic_optimum(cost), table, n_p, n_g)


def exhaustive_match(pred: Pattern, gt: Pattern) -> MatchResult:
    """枚举全部分配的参照实现，仅用于小规模核对"""
    n_p, n_g = len(pred.panels), len(gt.panels)
    if n_p == 0 or n_g == 0:
        return _result([], {}, n_p, n_g)
    table = alignment_table(pred, gt)
    if n_p <= n_g:
        candidates = [list(zip(range(n_p), perm)) for perm in itertools.permutations(range(n_g), n_p)]
    else:
        candidates = [sorted(zip(perm, range(n_g))) for perm in itertools.permutations(range(n_p), n_g)]
    totals = [sum(table[pair].cost for pair in pairs) for pairs in candidates]
    best = min(totals)
    tied = [sorted(pairs) for pairs, total in zip(candidates, totals) if total <= best + _tie_tol(best)]
    return _result(min(tied), table, n_p, n_g)


__all__ = [
    "EDGE_COUNT_PENALTY",
    "PanelAlignment",
    "MatchResult",
    "align_panels",
    "match_panels",
    "exhaustive_match",
    "centered_vertices",
]
