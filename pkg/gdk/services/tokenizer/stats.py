#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
归一化统计量模块：逐维 min/max 平移缩放，把所有真实 token 映射到 [-1, 1]
"""

import json
from pathlib import Path
from typing import Iterable, List

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from gdk.core.exceptions import ConfigException, LayoutMismatchException
from gdk.services.pattern.model import Pattern
from gdk.services.tokenizer.layout import TokenLayout
from gdk.services.tokenizer.rows import pattern_rows
from gdk.utils.json_utils import dumps_canonical

SCALE_FLOOR = 1e-6


class NormStats(BaseModel):
    """逐维平移与缩放"""

    model_config = ConfigDict(frozen=True)

    layout: TokenLayout
    shift: List[float]
    scale: List[float]

    @model_validator(mode="after")
    def _check_width(self) -> "NormStats":
        width = self.layout.token_width
        if len(self.shift) != width or len(self.scale) != width:
            raise ValueError(f"统计量长度应为 {width}")
        if any(s <= 0 for s in self.scale):
            raise ValueError("缩放系数必须为正")
        return self

    @property
    def shift_array(self) -> np.ndarray:
        return np.asarray(self.shift, dtype=np.float64)

    @property
    def scale_array(self) -> np.ndarray:
        return np.asarray(self.scale, dtype=np.float64)

    def normalize(self, rows: np.ndarray) -> np.ndarray:
        return (rows - self.shift_array) / self.scale_array

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        return values * self.scale_array + self.shift_array

    def ensure_layout(self, layout: TokenLayout) -> None:
        if self.layout != layout:
            raise LayoutMismatchException(
                "统计量与布局不一致",
                details={"stats_layout": self.layout.model_dump(), "layout": layout.model_dump()},
            )


def compute_stats(patterns: Iterable[Pattern], layout: TokenLayout) -> NormStats:
    """shift = (max+min)/2, scale = (max−min)/2，只统计真实边 token"""
    blocks = [rows for p in patterns for rows in pattern_rows(p, layout)]
    if not blocks:
        raise ConfigException("计算统计量需要至少一个版型")

    data = np.concatenate(blocks, axis=0)
    hi, lo = data.max(axis=0), data.min(axis=0)
    shift = (hi + lo) / 2.0
    scale = np.maximum((hi - lo) / 2.0, SCALE_FLOOR)
    logger.info(f"📊 统计量计算完成: {data.shape[0]} 个边 token, D={layout.token_width}")
    return NormStats(layout=layout, shift=shift.tolist(), scale=scale.tolist())


def save_stats(stats: NormStats, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "layout": stats.layout.model_dump(),
        "shift": [float(v) for v in stats.shift],
        "scale": [float(v) for v in stats.scale],
    }
    path.write_text(dumps_canonical(payload), encoding="utf-8")
    return path


def load_stats(path: Path | str) -> NormStats:
    path = Path(path)
    try:
        return NormStats.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except FileNotFoundError as exc:
        raise ConfigException(f"统计量文件不存在: {path}") from exc
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigException(f"统计量文件无效: {path}", details={"error": str(exc)}) from exc
