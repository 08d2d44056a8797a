#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
DiT 去噪器
"""

from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.denoiser.model import (
    decoupled_cross_attention,
    denoising_loss,
    embed_tokens,
    forward,
    predict_noise,
    time_embedding,
)
from gdk.services.denoiser.params import DenoiserParams

__all__ = [
    "DenoiserConfig",
    "DenoiserParams",
    "decoupled_cross_attention",
    "denoising_loss",
    "embed_tokens",
    "forward",
    "predict_noise",
    "time_embedding",
]
