#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""去噪器整体梯度检查：float64、随机输出头、双模态条件"""
from __future__ import annotations

from typing import Optional

import numpy as np
from loguru import logger

from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.bundle import ConditionBundle
from gdk.services.conditioning.sketch_encoder import SKETCH_SIZE
from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.denoiser.model import denoising_loss
from gdk.services.denoiser.params import DenoiserParams, truncated_normal
from gdk.services.numerics.gradcheck import GradcheckResult, check_gradients

GRADCHECK_TOL = 1e-4
MIN_COORDS = 200


def gradcheck_inputs(config: DenoiserConfig, builder: ConditionBuilder, seed: int):
    """(参数, x_t, ε, t, 条件)；输出头随机初始化，否则大部分梯度恒为零"""
    rng = np.random.default_rng(seed)
    params = DenoiserParams.init(config, seed=seed, dtype=np.float64)
    values = dict(params.values)
    values["head.w"] = truncated_normal(rng, values["head.w"].shape)
    values["head.b"] = truncated_normal(rng, values["head.b"].shape)
    shape = (config.seq_len, config.token_width)
    x_t = rng.standard_normal(shape)
    eps = rng.standard_normal(shape)
    t = int(rng.integers(0, 1000))
    sketch = (rng.random((SKETCH_SIZE, SKETCH_SIZE)) > 0.8).astype(np.float64)
    conditions = builder.build(text="knee-length flared skirt", sketch=sketch)
    return values, x_t, eps, t, conditions


def denoiser_gradcheck(
    config: DenoiserConfig,
    builder: ConditionBuilder,
    seed: int = 0,
    min_coords: int = MIN_COORDS,
    conditions: Optional[ConditionBundle] = None,
) -> GradcheckResult:
    values, x_t, eps, t, default_conditions = gradcheck_inputs(config, builder, seed)
    cond = conditions if conditions is not None else default_conditions
    per_param = max(1, -(-min_coords // len(values)))

    def loss_fn(tensors):
        return denoising_loss(tensors, x_t, eps, t, cond, config)

    result = check_gradients(
        loss_fn, values, coords_per_param=per_param, rng=np.random.default_rng([seed, 2])
    )
    logger.info(f"🔍 梯度检查: {result.n_checked} 个坐标, 最大相对误差 {result.max_rel_error:.3e}")
    return result


__all__ = ["GRADCHECK_TOL", "MIN_COORDS", "denoiser_gradcheck", "gradcheck_inputs"]
