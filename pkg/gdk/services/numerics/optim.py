#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""AdamW：解耦权重衰减 + 偏差修正的一阶/二阶矩"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from gdk.core.exceptions import NumericalException


@dataclass
class AdamWState:
    """优化器状态：已执行步数与按参数名存放的矩估计"""

    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: Mapping[str, np.ndarray]) -> "AdamWState":
        return cls(
            step=0,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adamw_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamWState,
    lr: float = 1e-4,
    betas: Tuple[float, float] = (0.95, 0.999),
    weight_decay: float = 1e-2,
    eps: float = 1e-8,
) -> Tuple[Dict[str, np.ndarray], AdamWState]:
    """返回更新后的参数与状态，不修改入参。

    θ ← θ·(1 − lr·wd) − lr·m̂/(√v̂ + eps)；缺失梯度的参数按零梯度处理。
    """
    b1, b2 = betas
    step = state.step + 1
    bc1 = 1.0 - b1**step
    bc2 = 1.0 - b2**step

    new_params: Dict[str, np.ndarray] = {}
    new_m: Dict[str, np.ndarray] = {}
    new_v: Dict[str, np.ndarray] = {}
    for name, theta in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(theta)
        if g.shape != theta.shape:
            raise NumericalException(
                f"参数 {name} 梯度形状不匹配", details={"param": list(theta.shape), "grad": list(g.shape)}
            )
        m_prev = state.m.get(name, np.zeros_like(theta))
        v_prev = state.v.get(name, np.zeros_like(theta))
        m = b1 * m_prev + (1.0 - b1) * g
        v = b2 * v_prev + (1.0 - b2) * g * g
        update = (m / bc1) / (np.sqrt(v / bc2) + eps)
        decayed = theta * (1.0 - lr * weight_decay)
        new_params[name] = (decayed - lr * update).astype(theta.dtype, copy=False)
        new_m[name] = m.astype(theta.dtype, copy=False)
        new_v[name] = v.astype(theta.dtype, copy=False)

    return new_params, AdamWState(step=step, m=new_m, v=new_v)


__all__ = ["AdamWState", "adamw_step"]
