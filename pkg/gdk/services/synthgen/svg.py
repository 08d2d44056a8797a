#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""版型平面图 SVG 渲染：每个面片一个 <g>，每条边一个 <path>，缝合边对同色"""
from __future__ import annotations

import colorsys
import math
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from gdk.services.pattern.model import Edge2D, Pattern
from gdk.services.synthgen.raster import panel_polylines

SVG_NS = "http://www.w3.org/2000/svg"
UNSTITCHED_COLOR = "#000000"
MARGIN = 5.0


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".") or "0"


def stitch_colors(pattern: Pattern) -> Dict[Tuple[int, int], str]:
    """每条缝合一个色相均匀分布的颜色"""
    colors: Dict[Tuple[int, int], str] = {}
    n = max(len(pattern.stitches), 1)
    for i, stitch in enumerate(pattern.stitches):
        r, g, b = colorsys.hsv_to_rgb(i / n, 0.85, 0.85)
        color = f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"
        colors[stitch.first] = color
        colors[stitch.second] = color
    return colors


def edge_path(edge: Edge2D, end, offset: np.ndarray) -> str:
    """SVG 路径命令；y 轴翻转，逆时针圆弧对应 sweep-flag = 1"""

    def pt(p) -> str:
        x, y = float(p[0]) + offset[0], -float(p[1]) + offset[1]
        return f"{_fmt(x)} {_fmt(y)}"

    d = f"M {pt(edge.start)} "
    if edge.arc is not None:
        r = _fmt(edge.arc.radius)
        d += f"A {r} {r} 0 {int(edge.arc.large_arc)} {int(edge.arc.ccw)} {pt(end)}"
    elif len(edge.control_points) == 1:
        d += f"Q {pt(edge.control_points[0])} {pt(end)}"
    elif len(edge.control_points) == 2:
        d += f"C {pt(edge.control_points[0])} {pt(edge.control_points[1])} {pt(end)}"
    else:
        d += f"L {pt(end)}"
    return d


def render_svg(pattern: Pattern) -> str:
    """面片按网格排布在各自二维坐标系中"""
    boxes = []
    for panel in pattern.panels:
        pts = np.vstack(panel_polylines(panel))
        boxes.append((pts.min(axis=0), pts.max(axis=0)))
    cell_w = max((hi[0] - lo[0] for lo, hi in boxes), default=0.0) + 2 * MARGIN
    cell_h = max((hi[1] - lo[1] for lo, hi in boxes), default=0.0) + 2 * MARGIN
    cols = max(1, math.ceil(math.sqrt(len(boxes))))
    rows = max(1, math.ceil(len(boxes) / cols))

    root = ET.Element(
        "svg",
        xmlns=SVG_NS,
        version="1.1",
        width=f"{_fmt(cols * cell_w)}cm",
        height=f"{_fmt(rows * cell_h)}cm",
        viewBox=f"0 0 {_fmt(cols * cell_w)} {_fmt(rows * cell_h)}",
    )
    ET.SubElement(root, "title").text = pattern.name
    colors = stitch_colors(pattern)

    for p_idx, (panel, (lo, hi)) in enumerate(zip(pattern.panels, boxes)):
        col, row = p_idx % cols, p_idx // cols
        # 面片包围盒左上角对齐到单元格左上角 + 边距
        offset = np.array([col * cell_w + MARGIN - lo[0], row * cell_h + MARGIN + hi[1]])
        group = ET.SubElement(root, "g", id=f"panel-{p_idx}")
        group.set("data-name", panel.name)
        verts = panel.vertices()
        for e_idx, edge in enumerate(panel.edges):
            ET.SubElement(
                group,
                "path",
                d=edge_path(edge, verts[(e_idx + 1) % len(verts)], offset),
                fill="none",
                stroke=colors.get((p_idx, e_idx), UNSTITCHED_COLOR),
                attrib={"stroke-width": "0.4", "data-edge": str(e_idx)},
            )
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def save_svg(pattern: Pattern, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(pattern), encoding="utf-8")
    return path


__all__ = ["render_svg", "save_svg", "stitch_colors", "edge_path"]
