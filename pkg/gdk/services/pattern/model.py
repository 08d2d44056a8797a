#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.pattern.model

缝纫版型的规范内存表示与磁盘格式。

层级结构
--------------
1. **Edge2D**：起点 + 0–2 个贝塞尔控制点，或一段圆弧 (radius, large_arc, ccw)。终点隐含为
   下一条边的起点，因此面片边环天然闭合。
2. **Panel**：有序边环 + XYZ 欧拉角（度）+ 平移（厘米）。
3. **Pattern**：面片列表 + 缝合关系，缝合引用 ``(panel_idx, edge_idx)``，从 0 开始。

磁盘格式为 UTF-8 JSON，键顺序固定，数字最多保留 9 位有效数字，因此
``save_pattern(load_pattern(f))`` 逐字节稳定。
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from gdk.core.exceptions import PatternParseException, PatternValidationException
from gdk.utils.json_utils import dumps_canonical, round_sig

Point2D = Tuple[float, float]
Vec3 = Tuple[float, float, float]
EdgeRef = Tuple[int, int]

# 这些 pydantic 错误类型代表结构不变量被破坏，其余（缺字段、类型错误）属于解析错误
_INVARIANT_ERROR_TYPES = {"value_error", "too_short", "too_long", "greater_than"}


class ArcParams(BaseModel):
    """圆弧参数：半径、优弧/劣弧、扫掠方向"""

    model_config = ConfigDict(frozen=True)

    radius: float = Field(..., gt=0, description="半径（厘米）")
    large_arc: bool = False
    ccw: bool = True


class Edge2D(BaseModel):
    """面片局部坐标系中的一条边"""

    model_config = ConfigDict(frozen=True)

    start: Point2D
    control_points: List[Point2D] = Field(default_factory=list, max_length=2)
    arc: Optional[ArcParams] = None

    @model_validator(mode="after")
    def _arc_excludes_controls(self) -> "Edge2D":
        if self.arc is not None and self.control_points:
            raise ValueError("圆弧边不能同时带有贝塞尔控制点")
        return self

    @property
    def kind(self) -> str:
        if self.arc is not None:
            return "arc"
        return ("line", "quadratic", "cubic")[len(self.control_points)]


class Panel(BaseModel):
    """闭合面片及其三维摆放"""

    model_config = ConfigDict(frozen=True)

    name: str
    edges: List[Edge2D] = Field(..., min_length=3)
    rotation: Vec3 = (0.0, 0.0, 0.0)
    translation: Vec3 = (0.0, 0.0, 0.0)

    @model_validator(mode="after")
    def _loop_is_closed(self) -> "Panel":
        # 终点隐含为下一条边的起点；零长度边意味着边环在此处断开
        n = len(self.edges)
        for j, edge in enumerate(self.edges):
            nxt = self.edges[(j + 1) % n].start
            if edge.start == nxt:
                raise ValueError(f"面片 {self.name} 第 {j} 条边长度为零，边环未闭合")
        return self

    def vertices(self) -> List[Point2D]:
        return [edge.start for edge in self.edges]


class Stitch(BaseModel):
    """两条边之间的缝合"""

    model_config = ConfigDict(frozen=True)

    first: EdgeRef
    second: EdgeRef

    @model_validator(mode="before")
    @classmethod
    def _from_pair(cls, data: Any) -> Any:
        # 磁盘格式为 [[p, e], [p, e]]
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return {"first": data[0], "second": data[1]}
        return data

    @model_validator(mode="after")
    def _distinct(self) -> "Stitch":
        if self.first == self.second:
            raise ValueError(f"缝合的两端不能是同一条边: {self.first}")
        return self

    def key(self) -> Tuple[EdgeRef, EdgeRef]:
        """无序边对的规范键"""
        return (self.first, self.second) if self.first <= self.second else (self.second, self.first)


class Pattern(BaseModel):
    """完整缝纫版型"""

    model_config = ConfigDict(frozen=True)

    name: str
    panels: List[Panel] = Field(..., min_length=1)
    stitches: List[Stitch] = Field(default_factory=list)

    @field_validator("panels", mode="before")
    @classmethod
    def _panels_list(cls, value: Any) -> Any:
        return list(value) if isinstance(value, tuple) else value

    @model_validator(mode="after")
    def _stitch_refs(self) -> "Pattern":
        seen: Dict[EdgeRef, int] = {}
        for s_idx, stitch in enumerate(self.stitches):
            for ref in (stitch.first, stitch.second):
                p_idx, e_idx = ref
                if not 0 <= p_idx < len(self.panels):
                    raise ValueError(f"缝合 {s_idx} 引用了不存在的面片 {p_idx}")
                if not 0 <= e_idx < len(self.panels[p_idx].edges):
                    raise ValueError(f"缝合 {s_idx} 引用了不存在的边 {ref}")
                if ref in seen:
                    raise ValueError(f"边 {ref} 同时出现在缝合 {seen[ref]} 和 {s_idx} 中")
                seen[ref] = s_idx
        return self

    @property
    def n_edges(self) -> int:
        return sum(len(p.edges) for p in self.panels)

    def stitch_set(self) -> set:
        return {s.key() for s in self.stitches}


def empty_pattern(name: str = "empty") -> Pattern:
    """构造零面片版型（仅用于解码纯填充网格，绕过 min_length 校验）"""
    return Pattern.model_construct(name=name, panels=[], stitches=[])


# ------------------------- Serialization -------------------------------------


def _edge_to_dict(edge: Edge2D) -> Dict[str, Any]:
    arc = None
    if edge.arc is not None:
        arc = {
            "radius": round_sig(edge.arc.radius),
            "large_arc": edge.arc.large_arc,
            "ccw": edge.arc.ccw,
        }
    return {
        "start": [round_sig(v) for v in edge.start],
        "control_points": [[round_sig(v) for v in cp] for cp in edge.control_points],
        "arc": arc,
    }


def pattern_to_dict(pattern: Pattern) -> Dict[str, Any]:
    """按规范键顺序转换为可序列化字典"""
    return {
        "name": pattern.name,
        "panels": [
            {
                "name": panel.name,
                "rotation": [round_sig(v) for v in panel.rotation],
                "translation": [round_sig(v) for v in panel.translation],
                "edges": [_edge_to_dict(e) for e in panel.edges],
            }
            for panel in pattern.panels
        ],
        "stitches": [[list(s.first), list(s.second)] for s in pattern.stitches],
    }


def pattern_to_json(pattern: Pattern) -> str:
    return dumps_canonical(pattern_to_dict(pattern))


def pattern_from_dict(data: Dict[str, Any]) -> Pattern:
    """校验字典并构造 Pattern，错误区分为解析错误与校验错误"""
    try:
        return Pattern.model_validate(data)
    except ValidationError as exc:
        errors = exc.errors(include_url=False)
        details = {"errors": [f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in errors]}
        if all(e["type"] in _INVARIANT_ERROR_TYPES for e in errors):
            raise PatternValidationException("版型校验失败", details=details) from exc
        raise PatternParseException("版型文件结构错误", details=details) from exc


def load_pattern(path: Path | str) -> Pattern:
    """读取并校验规范格式的版型文件"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise PatternParseException(f"版型文件不存在: {path}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise PatternParseException(f"版型文件不是合法 JSON: {path}", details={"error": str(exc)}) from exc

    if not isinstance(data, dict):
        raise PatternParseException(f"版型文件顶层必须是对象: {path}")
    pattern = pattern_from_dict(data)
    logger.debug(f"读取版型 {pattern.name}: {len(pattern.panels)} 个面片, {len(pattern.stitches)} 条缝合")
    return pattern


def save_pattern(pattern: Pattern, path: Path | str) -> Path:
    """写出规范格式的版型文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(pattern_to_json(pattern), encoding="utf-8")
    return path


__all__ = [
    "ArcParams",
    "Edge2D",
    "Panel",
    "Stitch",
    "Pattern",
    "empty_pattern",
    "pattern_to_dict",
    "pattern_to_json",
    "pattern_from_dict",
    "load_pattern",
    "save_pattern",
]
