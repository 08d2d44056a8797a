#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""草图特征替身：64×64 灰度图切成 64 个 8×8 块，随机投影到 cond_dim"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from gdk.core.exceptions import ConditionException
from gdk.services.conditioning.bundle import ModalityFeatures
from gdk.services.conditioning.text_encoder import l2_normalize

SKETCH_SIZE = 64
PATCH = 8


def to_patches(image: np.ndarray) -> np.ndarray:
    """(64, 64) → (64, 64)：按行优先顺序的块，每块展平"""
    g = SKETCH_SIZE // PATCH
    return image.reshape(g, PATCH, g, PATCH).transpose(0, 2, 1, 3).reshape(g * g, PATCH * PATCH)


class SketchEncoder:
    def __init__(self, cond_dim: int = 64, seed: int = 0):
        if cond_dim < 1:
            raise ConditionException(f"cond_dim 必须为正: {cond_dim}")
        self.cond_dim = cond_dim
        self.seed = seed
        rng = np.random.default_rng([seed, 1])
        self.projection = rng.standard_normal((PATCH * PATCH, cond_dim)) / PATCH

    def encode(self, image: np.ndarray) -> ModalityFeatures:
        image = np.asarray(image, dtype=np.float64)
        if image.shape != (SKETCH_SIZE, SKETCH_SIZE):
            raise ConditionException(
                f"草图尺寸必须为 {SKETCH_SIZE}×{SKETCH_SIZE}", details={"shape": list(image.shape)}
            )
        if not np.all(np.isfinite(image)) or image.min() < 0.0 or image.max() > 1.0:
            raise ConditionException("草图像素必须位于 [0, 1]")
        patches = to_patches(image) @ self.projection
        return ModalityFeatures(pooled=l2_normalize(patches.mean(axis=0)), sequence=patches)


@lru_cache(maxsize=8)
def _cached_encoder(cond_dim: int, seed: int) -> SketchEncoder:
    return SketchEncoder(cond_dim, seed)


def encode_sketch(image: np.ndarray, cond_dim: int = 64, seed: int = 0) -> ModalityFeatures:
    return _cached_encoder(cond_dim, seed).encode(image)


__all__ = ["SketchEncoder", "encode_sketch", "to_patches", "SKETCH_SIZE", "PATCH"]
