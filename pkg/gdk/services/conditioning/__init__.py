#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
条件编码：文本与草图的确定性特征替身
"""

from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.bundle import ConditionBundle, ModalityFeatures
from gdk.services.conditioning.pgm import read_pgm, write_pgm
from gdk.services.conditioning.sketch_encoder import SketchEncoder, encode_sketch
from gdk.services.conditioning.text_encoder import TextEncoder, encode_text, tokenize_caption

__all__ = [
    "ConditionBuilder",
    "ConditionBundle",
    "ModalityFeatures",
    "read_pgm",
    "write_pgm",
    "SketchEncoder",
    "encode_sketch",
    "TextEncoder",
    "encode_text",
    "tokenize_caption",
]
