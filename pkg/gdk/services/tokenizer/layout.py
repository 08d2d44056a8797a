#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Token 布局模块：M 个面片块 × 每块 N 条边，每条边一行宽度为 D 的 token
"""

from typing import Dict

from pydantic import BaseModel, ConfigDict, Field

from gdk.core.exceptions import ConfigException


class TokenLayout(BaseModel):
    """Token 网格布局"""

    model_config = ConfigDict(frozen=True)

    max_panels: int = Field(..., ge=1, description="面片上限 M")
    max_edges_per_panel: int = Field(..., ge=3, description="每个面片的边数上限 N")
    n_control_points: int = Field(1, ge=1, le=2, description="控制点槽位数 K")

    @property
    def token_width(self) -> int:
        """D = 起点 3 + 控制点 3K + 圆弧 3 + 缝合标签 3 + 缝合标志 1"""
        return 3 + 3 * self.n_control_points + 3 + 3 + 1

    @property
    def seq_len(self) -> int:
        return self.max_panels * self.max_edges_per_panel

    # 各字段在 token 中的列切片
    @property
    def start_slice(self) -> slice:
        return slice(0, 3)

    @property
    def control_slice(self) -> slice:
        return slice(3, 3 + 3 * self.n_control_points)

    @property
    def arc_slice(self) -> slice:
        k = 3 + 3 * self.n_control_points
        return slice(k, k + 3)

    @property
    def tag_slice(self) -> slice:
        k = 6 + 3 * self.n_control_points
        return slice(k, k + 3)

    @property
    def flag_index(self) -> int:
        return self.token_width - 1


PRESETS: Dict[str, TokenLayout] = {
    "dresscode": TokenLayout(max_panels=10, max_edges_per_panel=10, n_control_points=1),
    "garmentcode": TokenLayout(max_panels=37, max_edges_per_panel=39, n_control_points=2),
    "sewfactory": TokenLayout(max_panels=14, max_edges_per_panel=12, n_control_points=1),
}


def get_layout(preset: str) -> TokenLayout:
    """按名称获取布局预设"""
    try:
        return PRESETS[preset]
    except KeyError:
        raise ConfigException(
            f"未知的布局预设: {preset}", details={"available": sorted(PRESETS)}
        ) from None
