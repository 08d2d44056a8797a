#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
数值基础：张量与反向微分、AdamW、检查点、梯度检查
"""

from gdk.services.numerics.checkpoint import load_checkpoint, save_checkpoint
from gdk.services.numerics.gradcheck import GradcheckResult, check_gradients
from gdk.services.numerics.optim import AdamWState, adamw_step
from gdk.services.numerics.tensor import GradientMap, Tape, Tensor, backward

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "GradcheckResult",
    "check_gradients",
    "AdamWState",
    "adamw_step",
    "GradientMap",
    "Tape",
    "Tensor",
    "backward",
]
