#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""边的折线采样与正视草图栅格化"""
from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw

from gdk.services.conditioning.sketch_encoder import SKETCH_SIZE
from gdk.services.pattern.geometry import rotation_matrix
from gdk.services.pattern.model import ArcParams, Edge2D, Panel, Pattern

# 正视图窗口（厘米）：x ∈ [-90, 90]，y ∈ [-110, 70]
SKETCH_WINDOW: Tuple[float, float, float, float] = (-90.0, 90.0, -110.0, 70.0)


def arc_center(p0: np.ndarray, p1: np.ndarray, arc: ArcParams) -> Tuple[np.ndarray, float]:
    """圆心与实际半径（半径小于半弦长时取半弦长）"""
    chord = p1 - p0
    d = float(np.linalg.norm(chord))
    r = max(arc.radius, d / 2.0)
    h = np.sqrt(max(r * r - d * d / 4.0, 0.0))
    left = np.array([-chord[1], chord[0]]) / d
    side = 1.0 if arc.ccw != arc.large_arc else -1.0
    return (p0 + p1) / 2.0 + side * h * left, r


def arc_points(p0: np.ndarray, p1: np.ndarray, arc: ArcParams, samples: int) -> np.ndarray:
    center, r = arc_center(p0, p1, arc)
    a0 = np.arctan2(*(p0 - center)[::-1])
    a1 = np.arctan2(*(p1 - center)[::-1])
    if arc.ccw:
        sweep = (a1 - a0) % (2 * np.pi)
    else:
        sweep = -((a0 - a1) % (2 * np.pi))
    angles = a0 + sweep * np.linspace(0.0, 1.0, samples)
    return center + r * np.column_stack([np.cos(angles), np.sin(angles)])


def edge_polyline(edge: Edge2D, end: Sequence[float], samples: int = 16) -> np.ndarray:
    """边在面片坐标系中的折线，含两端点"""
    p0 = np.asarray(edge.start, dtype=np.float64)
    p1 = np.asarray(end, dtype=np.float64)
    if edge.arc is not None:
        return arc_points(p0, p1, edge.arc, samples)
    if not edge.control_points:
        return np.vstack([p0, p1])
    ctrl = [p0] + [np.asarray(c, dtype=np.float64) for c in edge.control_points] + [p1]
    u = np.linspace(0.0, 1.0, samples)[:, None]
    if len(ctrl) == 3:
        return (1 - u) ** 2 * ctrl[0] + 2 * (1 - u) * u * ctrl[1] + u**2 * ctrl[2]
    return (
        (1 - u) ** 3 * ctrl[0]
        + 3 * (1 - u) ** 2 * u * ctrl[1]
        + 3 * (1 - u) * u**2 * ctrl[2]
        + u**3 * ctrl[3]
    )


def panel_polylines(panel: Panel, samples: int = 16) -> List[np.ndarray]:
    verts = panel.vertices()
    n = len(verts)
    return [edge_polyline(e, verts[(j + 1) % n], samples) for j, e in enumerate(panel.edges)]


def render_sketch(pattern: Pattern, size: int = SKETCH_SIZE) -> np.ndarray:
    """正交正视投影（丢弃 z），1 像素线宽，0.5 二值化后的 [0, 1] 灰度图"""
    x_min, x_max, y_min, y_max = SKETCH_WINDOW
    img = Image.new("L", (size, size), 0)
    draw = ImageDraw.Draw(img)
    for panel in pattern.panels:
        rot = rotation_matrix(panel.rotation)
        trans = np.asarray(panel.translation, dtype=np.float64)
        for line in panel_polylines(panel):
            world = np.column_stack([line, np.zeros(len(line))]) @ rot.T + trans
            px = (world[:, 0] - x_min) / (x_max - x_min) * (size - 1)
            py = (y_max - world[:, 1]) / (y_max - y_min) * (size - 1)
            draw.line([(float(x), float(y)) for x, y in zip(px, py)], fill=255, width=1)
    pixels = np.asarray(img, dtype=np.float64) / 255.0
    return (pixels >= 0.5).astype(np.float64)


__all__ = ["arc_center", "arc_points", "edge_polyline", "panel_polylines", "render_sketch", "SKETCH_WINDOW"]
