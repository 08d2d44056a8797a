#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.pattern.geometry

二维面片与三维摆放之间的几何换算。

* ``place_panel``：点 (x, y) 抬升为 (x, y, 0)，乘以 R = R_x·R_y·R_z，再加平移。
* ``compute_stitch_tags``：缝合边对的标签为两条边四个三维端点的均值。
* ``recover_placement``：由三维顶点反求面片平面、规范平面内坐标系与欧拉角。
  平移取质心；法向取方差最小的主轴，符号使投影多边形逆时针；平面内 x 轴为第一条边
  弦向量的投影。GT 与生成结果使用同一规则，比较才有意义。
  圆弧的扫掠方向同样以规范坐标系为准：源面片顺时针时取反。
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from gdk.services.pattern.model import ArcParams, Edge2D, Panel, Pattern

_DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class PlacedEdge:
    """摆放到三维空间中的一条边"""

    start3d: np.ndarray
    end3d: np.ndarray
    controls3d: List[np.ndarray] = field(default_factory=list)
    arc_params: np.ndarray = field(default_factory=lambda: np.zeros(3))
    stitch_tag: np.ndarray = field(default_factory=lambda: np.zeros(3))
    stitch_flag: int = 0


@dataclass(frozen=True)
class PlacementRecovery:
    """recover_placement 的结果"""

    rotation: np.ndarray  # XYZ 欧拉角（度）
    translation: np.ndarray
    points2d: np.ndarray
    basis: np.ndarray  # 列向量依次为平面内 x、y 轴与法向
    degenerate: bool = False

    def to_local(self, points3d: np.ndarray) -> np.ndarray:
        """用同一坐标系把任意三维点表示为面片二维坐标"""
        centered = np.atleast_2d(np.asarray(points3d, dtype=np.float64)) - self.translation
        return centered @ self.basis[:, :2]


def rotation_matrix(euler_deg: Sequence[float]) -> np.ndarray:
    """XYZ 欧拉角（度）→ 旋转矩阵，按 R_x·R_y·R_z 组合"""
    ax, ay, az = np.deg2rad(np.asarray(euler_deg, dtype=np.float64))
    cx, sx = np.cos(ax), np.sin(ax)
    cy, sy = np.cos(ay), np.sin(ay)
    cz, sz = np.cos(az), np.sin(az)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    return rx @ ry @ rz


def matrix_to_euler(matrix: np.ndarray) -> np.ndarray:
    """旋转矩阵 → XYZ 欧拉角（度），与 rotation_matrix 互逆"""
    r = np.asarray(matrix, dtype=np.float64)
    sy = float(np.clip(r[0, 2], -1.0, 1.0))
    ay = np.arcsin(sy)
    if abs(sy) < 1.0 - 1e-12:
        ax = np.arctan2(-r[1, 2], r[2, 2])
        az = np.arctan2(-r[0, 1], r[0, 0])
    else:
        # 万向锁：z 角并入 x 角
        ax = np.arctan2(r[2, 1], r[1, 1])
        az = 0.0
    return np.rad2deg(np.array([ax, ay, az]))


def lift_points(points2d: np.ndarray, rotation: Sequence[float], translation: Sequence[float]) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points2d, dtype=np.float64))
    lifted = np.column_stack([pts, np.zeros(len(pts))])
    return lifted @ rotation_matrix(rotation).T + np.asarray(translation, dtype=np.float64)


def is_clockwise(panel: Panel) -> bool:
    """面片二维顶点是否顺时针"""
    return _signed_area(np.array(panel.vertices(), dtype=np.float64)) < 0


def canonical_arc(arc: Optional[ArcParams], mirrored: bool) -> Optional[ArcParams]:
    """规范坐标系总是逆时针；源面片顺时针时二维坐标被镜像，扫掠方向随之取反"""
    if arc is None or not mirrored:
        return arc
    return arc.model_copy(update={"ccw": not arc.ccw})


def _arc_vector(arc: Optional[ArcParams]) -> np.ndarray:
    if arc is None:
        return np.zeros(3)
    return np.array([arc.radius, float(arc.large_arc), float(arc.ccw)])


def place_panel(panel: Panel) -> List[PlacedEdge]:
    """把面片的所有边摆放到三维空间，缝合字段置零

    圆弧方向按规范（逆时针）坐标系写出，解码端无需知道源面片的绕向。
    """
    mirrored = is_clockwise(panel)
    rot = rotation_matrix(panel.rotation)
    trans = np.asarray(panel.translation, dtype=np.float64)

    def lift(p) -> np.ndarray:
        return rot @ np.array([p[0], p[1], 0.0]) + trans

    starts = [lift(e.start) for e in panel.edges]
    n = len(starts)
    return [
        PlacedEdge(
            start3d=starts[j],
            end3d=starts[(j + 1) % n],
            controls3d=[lift(cp) for cp in edge.control_points],
            arc_params=_arc_vector(canonical_arc(edge.arc, mirrored)),
        )
        for j, edge in enumerate(panel.edges)
    ]


def place_pattern(pattern: Pattern) -> List[List[PlacedEdge]]:
    """摆放全部面片并填充缝合标签"""
    placed = [place_panel(panel) for panel in pattern.panels]
    return compute_stitch_tags(pattern, placed)


def compute_stitch_tags(pattern: Pattern, placed: List[List[PlacedEdge]]) -> List[List[PlacedEdge]]:
    """缝合边对的标签 = 两条边四个端点的均值，两端标签完全相同"""
    updated = [list(edges) for edges in placed]
    for stitch in pattern.stitches:
        (pa, ea), (pb, eb) = stitch.first, stitch.second
        a, b = placed[pa][ea], placed[pb][eb]
        tag = (a.start3d + a.end3d + b.start3d + b.end3d) / 4.0
        updated[pa][ea] = replace(updated[pa][ea], stitch_tag=tag.copy(), stitch_flag=1)
        updated[pb][eb] = replace(updated[pb][eb], stitch_tag=tag.copy(), stitch_flag=1)
    return updated


def _signed_area(points2d: np.ndarray) -> float:
    x, y = points2d[:, 0], points2d[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def recover_placement(points3d: np.ndarray) -> PlacementRecovery:
    """由一个面片的三维顶点反求摆放（旋转、平移）与规范二维顶点"""
    pts = np.asarray(points3d, dtype=np.float64)
    centroid = pts.mean(axis=0)
    centered = pts - centroid

    # 奇异值降序排列，vt[2] 为方差最小的主轴
    _, sing, vt = np.linalg.svd(centered, full_matrices=True)
    scale = max(float(sing[0]) if len(sing) else 0.0, 1.0)
    if len(pts) < 3 or len(sing) < 2 or sing[1] <= _DEGENERATE_RTOL * scale:
        return PlacementRecovery(
            rotation=np.zeros(3),
            translation=centroid,
            points2d=centered[:, :2].copy(),
            basis=np.eye(3),
            degenerate=True,
        )

    normal = vt[2] / np.linalg.norm(vt[2])
    chord = pts[1] - pts[0]
    chord = chord - np.dot(chord, normal) * normal
    if np.linalg.norm(chord) <= _DEGENERATE_RTOL * scale:
        chord = vt[0]
    x_axis = chord / np.linalg.norm(chord)

    y_axis = np.cross(normal, x_axis)
    if _signed_area(centered @ np.column_stack([x_axis, y_axis])) < 0:
        normal = -normal
        y_axis = np.cross(normal, x_axis)

    basis = np.column_stack([x_axis, y_axis, normal])
    return PlacementRecovery(
        rotation=matrix_to_euler(basis),
        translation=centroid,
        points2d=centered @ basis[:, :2],
        basis=basis,
    )


def canonicalize_panel(panel: Panel) -> tuple[Panel, bool]:
    """摆放后再用 recover_placement 重新表达，返回 (规范面片, 是否退化)"""
    rot = rotation_matrix(panel.rotation)
    trans = np.asarray(panel.translation, dtype=np.float64)
    verts3d = lift_points(np.array(panel.vertices()), panel.rotation, panel.translation)
    rec = recover_placement(verts3d)
    mirrored = is_clockwise(panel) and not rec.degenerate

    edges: List[Edge2D] = []
    for j, edge in enumerate(panel.edges):
        cps = []
        if edge.control_points:
            cp3 = np.array([rot @ np.array([c[0], c[1], 0.0]) + trans for c in edge.control_points])
            cps = [tuple(map(float, p)) for p in rec.to_local(cp3)]
        edges.append(
            Edge2D(
                start=tuple(map(float, rec.points2d[j])),
                control_points=cps,
                arc=canonical_arc(edge.arc, mirrored),
            )
        )
    canonical = Panel(
        name=panel.name,
        edges=edges,
        rotation=tuple(map(float, rec.rotation)),
        translation=tuple(map(float, rec.translation)),
    )
    return canonical, rec.degenerate


def canonicalize_pattern(pattern: Pattern) -> Pattern:
    """逐面片规范化，缝合关系不变"""
    if not pattern.panels:
        return pattern
    panels = [canonicalize_panel(p)[0] for p in pattern.panels]
    return Pattern(name=pattern.name, panels=panels, stitches=list(pattern.stitches))


__all__ = [
    "PlacedEdge",
    "PlacementRecovery",
    "rotation_matrix",
    "matrix_to_euler",
    "lift_points",
    "is_clockwise",
    "canonical_arc",
    "place_panel",
    "place_pattern",
    "compute_stitch_tags",
    "recover_placement",
    "canonicalize_panel",
    "canonicalize_pattern",
]
