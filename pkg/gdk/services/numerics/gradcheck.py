#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""中心差分梯度检查"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from gdk.services.numerics.tensor import Tensor, backward, parameters

LossFn = Callable[[Dict[str, Tensor]], Tensor]


@dataclass
class GradcheckResult:
    max_rel_error: float
    n_checked: int
    worst: Optional[Tuple[str, Tuple[int, ...]]] = None

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error < tolerance


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def check_gradients(
    loss_fn: LossFn,
    values: Mapping[str, np.ndarray],
    h: float = 1e-5,
    coords_per_param: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GradcheckResult:
    """比较解析梯度与中心差分。

    values 必须是 float64。coords_per_param 为 None 时检查全部坐标，否则每个参数随机抽样。
    """
    rng = rng or np.random.default_rng(0)
    base = {k: np.array(v, dtype=np.float64) for k, v in values.items()}
    leaves = parameters(base.items())
    grads = backward(loss_fn(leaves)).by_name()

    def evaluate(name: str, index: Tuple[int, ...], delta: float) -> float:
        shifted = dict(base)
        arr = base[name].copy()
        arr[index] += delta
        shifted[name] = arr
        return float(loss_fn({k: Tensor(v) for k, v in shifted.items()}).data)

    worst_err = 0.0
    worst: Optional[Tuple[str, Tuple[int, ...]]] = None
    checked = 0
    for name, arr in base.items():
        all_idx: List[Tuple[int, ...]] = list(np.ndindex(arr.shape))
        if coords_per_param is not None and len(all_idx) > coords_per_param:
            picks = rng.choice(len(all_idx), size=coords_per_param, replace=False)
            all_idx = [all_idx[i] for i in sorted(picks)]
        analytic = grads.get(name, np.zeros_like(arr))
        for index in all_idx:
            numeric = (evaluate(name, index, h) - evaluate(name, index, -h)) / (2.0 * h)
            err = relative_error(float(analytic[index]), numeric)
            checked += 1
            if err > worst_err:
                worst_err, worst = err, (name, index)

    return GradcheckResult(max_rel_error=worst_err, n_checked=checked, worst=worst)


__all__ = ["GradcheckResult", "check_gradients", "relative_error"]
