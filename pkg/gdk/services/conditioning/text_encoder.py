#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.conditioning.text_encoder

确定性的文本特征替身：小写后按字母数字切词（保留词内连字符与撇号），
每个词经 64 位 FNV-1a 哈希映射到固定种子的 4096×cond_dim 随机表。
"""
from __future__ import annotations

import re
from functools import lru_cache
from typing import List

import numpy as np

from gdk.core.exceptions import ConditionException
from gdk.services.conditioning.bundle import ModalityFeatures

VOCAB_ROWS = 4096
MAX_TOKENS = 77

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")


def fnv1a_64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def tokenize_caption(text: str) -> List[str]:
    """切词并截断到 77 个"""
    return _TOKEN_RE.findall(text.lower())[:MAX_TOKENS]


def l2_normalize(vector: np.ndarray) -> np.ndarray:
    """零向量原样返回"""
    norm = float(np.linalg.norm(vector))
    if norm <= 1e-12:
        return np.zeros_like(vector)
    return vector / norm


class TextEncoder:
    """固定种子的哈希词表编码器"""

    def __init__(self, cond_dim: int = 64, seed: int = 0):
        if cond_dim < 1:
            raise ConditionException(f"cond_dim 必须为正: {cond_dim}")
        self.cond_dim = cond_dim
        self.seed = seed
        self.table = np.random.default_rng([seed, 0]).standard_normal((VOCAB_ROWS, cond_dim))

    def encode(self, text: str) -> ModalityFeatures:
        if not text or not text.strip():
            raise ConditionException("文本条件为空")
        tokens = tokenize_caption(text)
        if not tokens:
            raise ConditionException("文本条件不含任何可识别的词", details={"text": text})
        idx = np.array([fnv1a_64(tok) % VOCAB_ROWS for tok in tokens], dtype=np.int64)
        sequence = self.table[idx]
        return ModalityFeatures(pooled=l2_normalize(sequence.mean(axis=0)), sequence=sequence)


@lru_cache(maxsize=8)
def _cached_encoder(cond_dim: int, seed: int) -> TextEncoder:
    return TextEncoder(cond_dim, seed)


def encode_text(text: str, cond_dim: int = 64, seed: int = 0) -> ModalityFeatures:
    return _cached_encoder(cond_dim, seed).encode(text)


__all__ = ["TextEncoder", "encode_text", "tokenize_caption", "fnv1a_64", "l2_normalize", "MAX_TOKENS"]
