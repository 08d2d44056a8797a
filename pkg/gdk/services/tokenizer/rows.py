#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
原始（未归一化）边参数行：e ⊕ c ⊕ a ⊕ s ⊕ f
"""

from typing import List

import numpy as np

from gdk.core.exceptions import CapacityExceededException
from gdk.services.pattern.geometry import PlacedEdge, place_pattern
from gdk.services.pattern.model import Pattern
from gdk.services.tokenizer.layout import TokenLayout


def edge_row(edge: PlacedEdge, layout: TokenLayout) -> np.ndarray:
    """单条已摆放边的原始参数行；直线与圆弧把起点复制进全部控制点槽位"""
    k = layout.n_control_points
    if len(edge.controls3d) > k:
        raise CapacityExceededException(
            f"边带有 {len(edge.controls3d)} 个控制点，布局只支持 {k} 个",
            details={"n_control_points": k},
        )
    if edge.controls3d:
        controls = list(edge.controls3d)
        # 二次曲线在 K=2 布局中两个槽位填同一个控制点
        while len(controls) < k:
            controls.append(controls[-1])
    else:
        controls = [edge.start3d] * k

    row = np.zeros(layout.token_width)
    row[layout.start_slice] = edge.start3d
    row[layout.control_slice] = np.concatenate(controls)
    row[layout.arc_slice] = edge.arc_params
    row[layout.tag_slice] = edge.stitch_tag
    row[layout.flag_index] = float(edge.stitch_flag)
    return row


def check_capacity(pattern: Pattern, layout: TokenLayout) -> None:
    """确认版型可以放入布局"""
    if len(pattern.panels) > layout.max_panels:
        raise CapacityExceededException(
            f"版型 {pattern.name} 有 {len(pattern.panels)} 个面片，超过上限 {layout.max_panels}",
            details={"panels": len(pattern.panels), "max_panels": layout.max_panels},
        )
    for i, panel in enumerate(pattern.panels):
        if len(panel.edges) > layout.max_edges_per_panel:
            raise CapacityExceededException(
                f"面片 {i} ({panel.name}) 有 {len(panel.edges)} 条边，超过上限 {layout.max_edges_per_panel}",
                details={"panel": i, "edges": len(panel.edges)},
            )


def pattern_rows(pattern: Pattern, layout: TokenLayout) -> List[np.ndarray]:
    """按面片返回原始参数矩阵列表，每个矩阵形状为 (n_edges, D)"""
    check_capacity(pattern, layout)
    placed = place_pattern(pattern)
    return [np.stack([edge_row(e, layout) for e in edges]) for edges in placed]
