#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""8 位灰度 PGM（P5）读写"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from gdk.core.exceptions import ConditionException


def read_pgm(path: Path | str) -> np.ndarray:
    """读取为 [0, 1] 浮点数组"""
    path = Path(path)
    if not path.is_file():
        raise ConditionException(f"草图文件不存在: {path}")
    try:
        with Image.open(path) as img:
            if img.format != "PPM" or img.mode != "L":
                raise ConditionException(f"草图必须是 8 位灰度 PGM: {path}", details={"mode": img.mode})
            pixels = np.asarray(img, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as e:
        raise ConditionException(f"无法读取草图 {path}: {e}")
    return pixels.astype(np.float64) / 255.0


def write_pgm(image: np.ndarray, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.clip(np.round(np.asarray(image, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PPM")
    return path


__all__ = ["read_pgm", "write_pgm"]
