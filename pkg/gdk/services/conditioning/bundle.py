#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""条件特征容器"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ModalityFeatures:
    """单一模态的池化向量 + 序列特征"""

    pooled: np.ndarray
    sequence: np.ndarray

    @property
    def width(self) -> int:
        return int(self.pooled.shape[-1])

    def rows(self) -> np.ndarray:
        """送入交叉注意力的序列：池化行在前，长度 L+1"""
        return np.vstack([self.pooled[None, :], self.sequence])


@dataclass(frozen=True)
class ConditionBundle:
    """文本 / 草图条件，任一可缺省"""

    text: Optional[ModalityFeatures] = None
    image: Optional[ModalityFeatures] = None

    @property
    def modality(self) -> str:
        if self.text is not None and self.image is not None:
            return "both"
        if self.text is not None:
            return "text"
        if self.image is not None:
            return "image"
        return "none"

    def select(self, use_text: bool, use_image: bool) -> "ConditionBundle":
        """按训练模态丢弃条件"""
        return replace(
            self,
            text=self.text if use_text else None,
            image=self.image if use_image else None,
        )


__all__ = ["ModalityFeatures", "ConditionBundle"]
