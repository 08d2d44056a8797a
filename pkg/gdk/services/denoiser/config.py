#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
去噪 Transformer 配置
"""

from typing import Dict, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from gdk.core.exceptions import ConfigException
from gdk.services.tokenizer.layout import TokenLayout

PresetName = Literal["desk", "paper"]

# 预设只规定网络宽度与深度，网格尺寸取自布局
_PRESET_SHAPES: Dict[str, Dict[str, int]] = {
    "desk": {"embed_dim": 64, "ffn_dim": 96, "n_blocks": 2, "n_heads": 4},
    "paper": {"embed_dim": 768, "ffn_dim": 1024, "n_blocks": 12, "n_heads": 8},
}


class DenoiserConfig(BaseModel):
    """DiT 去噪器超参数"""

    model_config = ConfigDict(frozen=True)

    embed_dim: int = Field(64, ge=1, description="隐藏维度 C")
    ffn_dim: int = Field(96, ge=1, description="前馈层宽度")
    n_blocks: int = Field(2, ge=1, description="DiT 块数")
    n_heads: int = Field(4, ge=1, description="注意力头数")
    token_width: int = Field(..., ge=1, description="token 宽度 D")
    max_panels: int = Field(..., ge=1, description="M")
    max_edges_per_panel: int = Field(..., ge=1, description="N")
    cond_dim: int = Field(64, ge=1, description="条件特征维度")

    @model_validator(mode="after")
    def _heads_divide_width(self) -> "DenoiserConfig":
        if self.embed_dim % self.n_heads:
            raise ValueError(f"embed_dim={self.embed_dim} 不能被 n_heads={self.n_heads} 整除")
        if self.embed_dim % 2:
            raise ValueError("embed_dim 必须为偶数（正余弦时间编码成对）")
        return self

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.n_heads

    @property
    def seq_len(self) -> int:
        return self.max_panels * self.max_edges_per_panel

    def matches_layout(self, layout: TokenLayout) -> bool:
        return (
            self.token_width == layout.token_width
            and self.max_panels == layout.max_panels
            and self.max_edges_per_panel == layout.max_edges_per_panel
        )

    @classmethod
    def preset(cls, name: str, layout: TokenLayout, cond_dim: int = 64) -> "DenoiserConfig":
        if name not in _PRESET_SHAPES:
            raise ConfigException(f"未知的去噪器预设: {name}", details={"available": sorted(_PRESET_SHAPES)})
        return cls(
            **_PRESET_SHAPES[name],
            token_width=layout.token_width,
            max_panels=layout.max_panels,
            max_edges_per_panel=layout.max_edges_per_panel,
            cond_dim=cond_dim,
        )


__all__ = ["DenoiserConfig", "PresetName"]
