#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.tokenizer.codec

Pattern ⇄ TokenGrid 双向映射。

编码
--------------
1. 每个面片摆放到三维，逐边得到原始行 e ⊕ c ⊕ a ⊕ s ⊕ f。
2. 可选地用 ``shuffle_seed`` 打乱面片顺序（面片内边序不变）。
3. 面片 i 的第 j 条边写入第 ``i·N + j`` 行，归一化；填充行保持全零。

解码
--------------
1. 面片块中任一行 L∞ > τ_pad 即视为真实面片，块内逐行同样判定真实边。
2. 反归一化后三维起点经 ``recover_placement`` 还原为二维面片 + 旋转 + 平移。
3. 缝合标志高于归一化中点的边参与配对：标签互为最近邻且距离 ≤ τ_stitch，
   按距离升序贪心配对，每条边至多使用一次。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError

from gdk.core.exceptions import LayoutMismatchException
from gdk.services.pattern.geometry import recover_placement
from gdk.services.pattern.model import ArcParams, Edge2D, Panel, Pattern, Stitch, empty_pattern
from gdk.services.tokenizer.layout import TokenLayout
from gdk.services.tokenizer.rows import pattern_rows
from gdk.services.tokenizer.stats import NormStats


@dataclass
class TokenGrid:
    """(M·N) × D 的归一化 token 矩阵与有效掩码"""

    values: np.ndarray
    panel_mask: np.ndarray
    edge_mask: np.ndarray
    # panel_order[i] = 第 i 个面片块对应的原版型面片下标
    panel_order: List[int] = field(default_factory=list)

    def block(self, i: int, layout: TokenLayout) -> np.ndarray:
        n = layout.max_edges_per_panel
        return self.values[i * n : (i + 1) * n]


@dataclass
class DecodeReport:
    """解码统计"""

    real_panels: int = 0
    dropped_panels: int = 0
    unpaired_flags: int = 0


class PatternCodec:
    """版型编解码器，阈值来自配置"""

    def __init__(
        self,
        pad_threshold: float = 0.02,
        stitch_radius: float = 3.0,
        control_point_tol: float = 1e-2,
    ):
        self.pad_threshold = pad_threshold
        self.stitch_radius = stitch_radius
        self.control_point_tol = control_point_tol

    # ------------------------------------------------------------------ encode

    def encode(
        self,
        pattern: Pattern,
        layout: TokenLayout,
        stats: NormStats,
        shuffle_seed: Optional[int] = None,
    ) -> TokenGrid:
        """把版型编码为归一化 token 网格"""
        stats.ensure_layout(layout)
        rows = pattern_rows(pattern, layout)

        order = list(range(len(rows)))
        if shuffle_seed is not None:
            order = [int(i) for i in np.random.default_rng(shuffle_seed).permutation(len(rows))]

        m, n, d = layout.max_panels, layout.max_edges_per_panel, layout.token_width
        values = np.zeros((m * n, d))
        panel_mask = np.zeros(m, dtype=bool)
        edge_mask = np.zeros(m * n, dtype=bool)
        for block, src in enumerate(order):
            panel_rows = rows[src]
            lo = block * n
            values[lo : lo + len(panel_rows)] = stats.normalize(panel_rows)
            panel_mask[block] = True
            edge_mask[lo : lo + len(panel_rows)] = True
        return TokenGrid(values=values, panel_mask=panel_mask, edge_mask=edge_mask, panel_order=order)

    # ------------------------------------------------------------------ decode

    def decode(self, grid: TokenGrid | np.ndarray, layout: TokenLayout, stats: NormStats) -> Pattern:
        return self.decode_with_report(grid, layout, stats)[0]

    def decode_with_report(
        self, grid: TokenGrid | np.ndarray, layout: TokenLayout, stats: NormStats, name: str = "decoded"
    ) -> Tuple[Pattern, DecodeReport]:
        """解码任意 token 值（编码结果或扩散采样结果）"""
        stats.ensure_layout(layout)
        values = grid.values if isinstance(grid, TokenGrid) else np.asarray(grid, dtype=np.float64)
        if values.shape != (layout.seq_len, layout.token_width):
            raise LayoutMismatchException(
                f"网格形状 {values.shape} 与布局 {(layout.seq_len, layout.token_width)} 不一致"
            )

        report = DecodeReport()
        n = layout.max_edges_per_panel
        panels: List[Panel] = []
        flagged: List[Tuple[int, int, np.ndarray]] = []
        flag_mid = (0.5 - stats.shift[layout.flag_index]) / stats.scale[layout.flag_index]

        for block in range(layout.max_panels):
            norm_rows = values[block * n : (block + 1) * n]
            real = np.abs(norm_rows).max(axis=1) > self.pad_threshold
            if not real.any():
                continue
            report.real_panels += 1
            norm_real = norm_rows[real]
            panel = self._decode_panel(stats.denormalize(norm_real), layout, f"panel_{block}")
            if panel is None:
                report.dropped_panels += 1
                continue
            p_idx = len(panels)
            panels.append(panel)
            raw = stats.denormalize(norm_real)
            for e_idx, (norm_row, raw_row) in enumerate(zip(norm_real, raw)):
                if norm_row[layout.flag_index] > flag_mid:
                    flagged.append((p_idx, e_idx, raw_row[layout.tag_slice]))

        if report.dropped_panels:
            logger.warning(f"⚠️ 解码时丢弃了 {report.dropped_panels} 个退化面片")
        if not panels:
            return empty_pattern(name), report

        stitches = self._pair_stitches(flagged)
        report.unpaired_flags = len(flagged) - 2 * len(stitches)
        return Pattern(name=name, panels=panels, stitches=stitches), report

    def _decode_panel(self, raw: np.ndarray, layout: TokenLayout, name: str) -> Optional[Panel]:
        if len(raw) < 3:
            return None
        starts = raw[:, layout.start_slice]
        rec = recover_placement(starts)
        if rec.degenerate:
            return None

        k = layout.n_control_points
        tol = self.control_point_tol
        edges: List[Edge2D] = []
        for j, row in enumerate(raw):
            start3 = starts[j]
            end3 = starts[(j + 1) % len(raw)]
            controls = row[layout.control_slice].reshape(k, 3)
            arc_vec = row[layout.arc_slice]
            chord = float(np.linalg.norm(end3 - start3))

            arc = None
            cps3: List[np.ndarray] = []
            if arc_vec[0] > 0.25 * chord and arc_vec[0] > tol:
                # 有效圆弧半径不小于半弦长
                arc = ArcParams(
                    radius=max(float(arc_vec[0]), 0.5 * chord),
                    large_arc=bool(arc_vec[1] > 0.5),
                    ccw=bool(arc_vec[2] > 0.5),
                )
            else:
                distinct = [c for c in controls if np.linalg.norm(c - start3) > tol]
                if len(distinct) == 1 or (
                    len(distinct) == 2 and np.linalg.norm(distinct[0] - distinct[1]) <= tol
                ):
                    cps3 = [distinct[0]]
                elif len(distinct) == 2:
                    cps3 = distinct

            cps2 = [tuple(map(float, p)) for p in rec.to_local(np.array(cps3))] if cps3 else []
            edges.append(Edge2D(start=tuple(map(float, rec.points2d[j])), control_points=cps2, arc=arc))

        try:
            return Panel(
                name=name,
                edges=edges,
                rotation=tuple(map(float, rec.rotation)),
                translation=tuple(map(float, rec.translation)),
            )
        except ValidationError:
            return None

    def _pair_stitches(self, flagged: List[Tuple[int, int, np.ndarray]]) -> List[Stitch]:
        """互为最近邻且距离不超过半径的标签配对"""
        if len(flagged) < 2:
            return []
        tags = np.stack([f[2] for f in flagged])
        dist = np.linalg.norm(tags[:, None, :] - tags[None, :, :], axis=-1)
        np.fill_diagonal(dist, np.inf)
        nearest = dist.argmin(axis=1)

        candidates = [
            (float(dist[a, b]), a, int(b))
            for a, b in enumerate(nearest)
            if a < b and nearest[b] == a and dist[a, b] <= self.stitch_radius
        ]
        candidates.sort()

        used = set()
        stitches: List[Stitch] = []
        for _, a, b in candidates:
            if a in used or b in used:
                continue
            used.update((a, b))
            ref_a = (flagged[a][0], flagged[a][1])
            ref_b = (flagged[b][0], flagged[b][1])
            stitches.append(Stitch(first=min(ref_a, ref_b), second=max(ref_a, ref_b)))
        return stitches


__all__ = ["TokenGrid", "DecodeReport", "PatternCodec"]
