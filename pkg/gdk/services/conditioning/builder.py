#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""把命令行 / 语料中的文本与草图组装成 ConditionBundle"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import numpy as np

from gdk.services.conditioning.bundle import ConditionBundle
from gdk.services.conditioning.pgm import read_pgm
from gdk.services.conditioning.sketch_encoder import SketchEncoder
from gdk.services.conditioning.text_encoder import TextEncoder


class ConditionBuilder:
    def __init__(self, text_encoder: TextEncoder, sketch_encoder: SketchEncoder):
        self.text_encoder = text_encoder
        self.sketch_encoder = sketch_encoder

    @property
    def cond_dim(self) -> int:
        return self.text_encoder.cond_dim

    def build(
        self,
        text: Optional[str] = None,
        sketch: Optional[Union[np.ndarray, str, Path]] = None,
    ) -> ConditionBundle:
        """两者都缺省时返回空 bundle（两路都走空 token）"""
        text_feats = self.text_encoder.encode(text) if text is not None else None
        image_feats = None
        if sketch is not None:
            pixels = read_pgm(sketch) if isinstance(sketch, (str, Path)) else sketch
            image_feats = self.sketch_encoder.encode(pixels)
        return ConditionBundle(text=text_feats, image=image_feats)


__all__ = ["ConditionBuilder"]
