#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.synthgen.templates

合成服装模板：裙、上衣、连衣裙。

世界坐标：y 轴向上，y = 0 为腰线；上衣向上延伸，裙向下延伸，z 轴朝前。
所有面片在自身坐标系中逆时针绕行，围绕 y 轴按等角度排布，
相邻面片的右侧缝与左侧缝缝合。只用直线、二次贝塞尔与圆弧，
因此任何实例都能放进 K=1 的 "dresscode" 布局。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from gdk.services.pattern.geometry import place_pattern
from gdk.services.pattern.model import ArcParams, Edge2D, Panel, Pattern, Stitch

Family = Literal["skirt", "top", "dress"]
Range = Tuple[float, float]

# 不同缝合标签之间的最小间距（厘米）
MIN_TAG_SEPARATION = 8.0


class GarmentTemplate(BaseModel):
    """一类服装的参数范围（厘米）"""

    model_config = ConfigDict(frozen=True)

    family: Family
    waist: Range = Field(..., description="单片腰线宽度")
    hem: Range = Field(..., description="单片下摆宽度")
    length: Range = Field(..., description="裙长或衣长")
    sleeve_length: Range = Field((0.0, 0.0), description="袖长，0 表示无袖")
    panel_counts: Tuple[int, ...] = Field((2,), description="裙片数候选")


TEMPLATES: Dict[str, GarmentTemplate] = {
    "skirt": GarmentTemplate(
        family="skirt", waist=(18.0, 24.0), hem=(26.0, 40.0), length=(38.0, 95.0), panel_counts=(2, 4)
    ),
    "top": GarmentTemplate(
        family="top", waist=(40.0, 50.0), hem=(40.0, 52.0), length=(52.0, 68.0), sleeve_length=(0.0, 60.0)
    ),
    "dress": GarmentTemplate(
        family="dress",
        waist=(36.0, 44.0),
        hem=(44.0, 64.0),
        length=(40.0, 90.0),
        sleeve_length=(0.0, 55.0),
        panel_counts=(2,),
    ),
}
FAMILY_ORDER: Tuple[str, ...] = ("skirt", "top", "dress")


@dataclass
class GarmentSample:
    pattern: Pattern
    brief: str
    detailed: str
    family: str
    attributes: Dict[str, str] = field(default_factory=dict)


def _r(value: float) -> float:
    return round(float(value), 1)


def _uniform(rng: np.random.Generator, bounds: Range) -> float:
    return _r(rng.uniform(*bounds))


def _ring_placement(k: int, count: int, radius: float, y: float) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """第 k 片绕 y 轴旋转 360k/count 度，面朝外"""
    theta = 360.0 * k / count
    rad = np.deg2rad(theta)
    rotation = (0.0, _r(theta if theta <= 180.0 else theta - 360.0), 0.0)
    translation = (_r(radius * np.sin(rad)), _r(y), _r(radius * np.cos(rad)))
    return rotation, translation


# ------------------------------------------------------------------ panels


def _skirt_panel(name: str, waist: float, hem: float, length: float, flare: float, waist_arc: bool) -> Panel:
    """边序：0 下摆，1 右侧缝，2 腰线，3 左侧缝"""
    bl, br = (_r(-hem / 2), _r(-length)), (_r(hem / 2), _r(-length))
    tr, tl = (_r(waist / 2), 0.0), (_r(-waist / 2), 0.0)
    hem_edge = Edge2D(start=bl, control_points=[(0.0, _r(-length - flare))] if flare > 0 else [])
    arc = ArcParams(radius=_r(waist * 1.5), large_arc=False, ccw=True) if waist_arc else None
    waist_edge = Edge2D(start=tr, arc=arc)
    return Panel(name=name, edges=[hem_edge, Edge2D(start=br), waist_edge, Edge2D(start=tl)])


def _bodice_panel(
    name: str, hem: float, chest: float, length: float, neck_depth: float, sleeved: bool
) -> Panel:
    """边序：0 下摆，1 右侧缝，2 右袖窿，3 右肩，4 领口，5 左肩，6 左袖窿，7 左侧缝"""
    arm_y = _r(length * 0.62)
    shoulder, neck = _r(chest * 0.42), _r(chest * 0.16)
    curve = 3.0 if sleeved else 5.0
    arm_mid = _r((arm_y + length) / 2)
    return Panel(
        name=name,
        edges=[
            Edge2D(start=(_r(-hem / 2), 0.0)),
            Edge2D(start=(_r(hem / 2), 0.0)),
            Edge2D(start=(_r(chest / 2), arm_y), control_points=[(_r(chest / 2 - curve), arm_mid)]),
            Edge2D(start=(shoulder, _r(length))),
            Edge2D(start=(neck, _r(length)), control_points=[(0.0, _r(length - neck_depth))]),
            Edge2D(start=(-neck, _r(length))),
            Edge2D(start=(-shoulder, _r(length)), control_points=[(_r(-chest / 2 + curve), arm_mid)]),
            Edge2D(start=(_r(-chest / 2), arm_y)),
        ],
    )


def _sleeve_panel(name: str, cap_width: float, cuff_width: float, sleeve_length: float) -> Panel:
    """边序：0 袖口，1 右袖缝，2 前袖山，3 后袖山，4 左袖缝"""
    cap_h = _r(cap_width * 0.3)
    return Panel(
        name=name,
        edges=[
            Edge2D(start=(_r(-cuff_width / 2), _r(-sleeve_length))),
            Edge2D(start=(_r(cuff_width / 2), _r(-sleeve_length))),
            Edge2D(start=(_r(cap_width / 2), 0.0), control_points=[(_r(cap_width * 0.3), _r(cap_h * 0.9))]),
            Edge2D(start=(0.0, cap_h), control_points=[(_r(-cap_width * 0.3), _r(cap_h * 0.9))]),
            Edge2D(start=(_r(-cap_width / 2), 0.0)),
        ],
    )


def _placed(panel: Panel, rotation, translation) -> Panel:
    return panel.model_copy(update={"rotation": rotation, "translation": translation})


# ------------------------------------------------------------------ garments


def _length_word(length: float) -> str:
    if length < 48:
        return "mini"
    if length < 66:
        return "knee length"
    if length < 82:
        return "midi"
    return "maxi"


def _sleeve_word(sleeve_length: float) -> str:
    if sleeve_length <= 0:
        return "sleeveless"
    return "short sleeve" if sleeve_length < 30 else "long sleeve"


def _add_skirt(
    panels: List[Panel], stitches: List[Stitch], count: int, waist: float, hem: float, length: float,
    flare: float, waist_arc: bool, y: float = 0.0,
) -> List[int]:
    names = ["front", "back"] if count == 2 else ["front", "side_left", "back", "side_right"]
    radius = max(hem, waist) * 0.45
    first = len(panels)
    for k, name in enumerate(names):
        rot, trans = _ring_placement(k, count, radius, y)
        panels.append(_placed(_skirt_panel(f"skirt_{name}", waist, hem, length, flare, waist_arc), rot, trans))
    for k in range(count):
        # 第 k 片右侧缝（边 1）接第 k+1 片左侧缝（边 3）
        stitches.append(Stitch(first=(first + k, 1), second=(first + (k + 1) % count, 3)))
    return list(range(first, first + count))


def _add_bodice(
    panels: List[Panel], stitches: List[Stitch], hem: float, chest: float, length: float,
    sleeve_length: float, neck_depths: Tuple[float, float],
) -> List[int]:
    sleeved = sleeve_length > 0
    radius = chest * 0.32
    first = len(panels)
    for k, name in enumerate(("front", "back")):
        rot, trans = _ring_placement(k, 2, radius, 0.0)
        panel = _bodice_panel(f"bodice_{name}", hem, chest, length, neck_depths[k], sleeved)
        panels.append(_placed(panel, rot, trans))
    front, back = first, first + 1
    stitches += [
        Stitch(first=(front, 7), second=(back, 1)),
        Stitch(first=(back, 7), second=(front, 1)),
        Stitch(first=(front, 3), second=(back, 5)),
        Stitch(first=(back, 3), second=(front, 5)),
    ]
    if sleeved:
        arm_y = length * 0.62
        cap = _r(0.2 * chest + 6.0)
        cuff = _r(cap * (0.8 if sleeve_length < 30 else 0.55))
        for side, angle in (("right", 90.0), ("left", -90.0)):
            sign = 1.0 if side == "right" else -1.0
            idx = len(panels)
            panels.append(
                _placed(
                    _sleeve_panel(f"sleeve_{side}", cap, cuff, sleeve_length),
                    (0.0, 0.0, angle),
                    (_r(sign * (chest / 2 + 2.0)), _r(arm_y), 0.0),
                )
            )
            stitches.append(Stitch(first=(idx, 1), second=(idx, 4)))
            # 右袖前袖山接前片右袖窿；左袖前袖山接前片左袖窿
            stitches.append(Stitch(first=(idx, 2), second=(front, 2 if side == "right" else 6)))
            stitches.append(Stitch(first=(idx, 3), second=(back, 6 if side == "right" else 2)))
    return [front, back]


def sample_garment(family: str, rng: np.random.Generator, name: str) -> GarmentSample:
    """按模板采样一件服装，返回版型与两级描述"""
    template = TEMPLATES[family]
    panels: List[Panel] = []
    stitches: List[Stitch] = []
    attrs: Dict[str, str] = {}
    phrases: List[str] = []

    if family == "skirt":
        count = int(rng.choice(template.panel_counts))
        waist, hem, length = (_uniform(rng, b) for b in (template.waist, template.hem, template.length))
        flare = _r(rng.uniform(2.0, 6.0)) if rng.random() < 0.5 else 0.0
        waist_arc = bool(rng.random() < 0.5)
        _add_skirt(panels, stitches, count, waist, hem, length, flare, waist_arc)
        attrs = {
            "length": _length_word(length),
            "shape": "flared" if flare > 0 else "straight",
            "panels": "two panels" if count == 2 else "four panels",
        }
        brief = f"{attrs['length']} {attrs['shape']} skirt"
        hem_phrase = "a curved hem" if flare > 0 else "a straight hem"
        waist_phrase = "a curved waistline" if waist_arc else "a straight waistline"
        phrases = [f"{p.name.replace('_', ' ')} panel with {hem_phrase} and {waist_phrase}" for p in panels]
        detailed = f"a {attrs['length']} skirt with {attrs['panels']}: " + "; ".join(phrases)

    else:
        sleeve = _uniform(rng, template.sleeve_length) if rng.random() < 0.6 else 0.0
        sleeve = sleeve if sleeve >= 12.0 else 0.0
        scoop = bool(rng.random() < 0.5)
        neck_depths = (_r(rng.uniform(9.0, 14.0)) if scoop else 5.0, 3.0)
        bodice_len = _uniform(rng, TEMPLATES["top"].length)
        chest = _uniform(rng, TEMPLATES["top"].waist)
        neck_word = "scoop neck" if scoop else "crew neck"
        if family == "top":
            hem = _uniform(rng, template.hem)
            _add_bodice(panels, stitches, hem, chest, bodice_len, sleeve, neck_depths)
            attrs = {"sleeve": _sleeve_word(sleeve), "neck": neck_word}
            brief = f"{attrs['sleeve']} top"
        else:
            waist = _uniform(rng, template.waist)
            front, back = _add_bodice(panels, stitches, waist, chest, bodice_len, sleeve, neck_depths)
            length = _uniform(rng, template.length)
            hem = _uniform(rng, template.hem)
            flare = _r(rng.uniform(2.0, 6.0)) if rng.random() < 0.5 else 0.0
            skirt = _add_skirt(panels, stitches, 2, waist, hem, length, flare, waist_arc=False)
            stitches.append(Stitch(first=(front, 0), second=(skirt[0], 2)))
            stitches.append(Stitch(first=(back, 0), second=(skirt[1], 2)))
            attrs = {"length": _length_word(length), "sleeve": _sleeve_word(sleeve), "neck": neck_word}
            brief = f"{attrs['length']} {attrs['sleeve']} dress"
        for p in panels:
            label = p.name.replace("_", " ")
            if p.name.startswith("bodice"):
                phrases.append(f"{label} panel with a {neck_word} neckline")
            elif p.name.startswith("sleeve"):
                phrases.append(f"{label} panel of {_sleeve_word(sleeve)} length")
            else:
                phrases.append(f"{label} panel with a {'curved' if p.edges[0].control_points else 'straight'} hem")
        lead = " ".join(w for w in (attrs.get("length"), attrs["sleeve"], family) if w)
        detailed = f"a {lead} with a {neck_word}: " + "; ".join(phrases)

    pattern = Pattern(name=name, panels=panels, stitches=stitches)
    return GarmentSample(pattern=pattern, brief=brief, detailed=detailed, family=family, attributes=attrs)


def min_tag_separation(pattern: Pattern) -> Optional[float]:
    """不同缝合之间标签的最小距离；少于两条缝合时返回 None"""
    tags = []
    placed = place_pattern(pattern)
    for stitch in pattern.stitches:
        p, e = stitch.first
        tags.append(placed[p][e].stitch_tag)
    if len(tags) < 2:
        return None
    pts = np.array(tags)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    return float(dist[~np.eye(len(pts), dtype=bool)].min())


__all__ = ["GarmentTemplate", "GarmentSample", "TEMPLATES", "FAMILY_ORDER", "sample_garment", "min_tag_separation"]
