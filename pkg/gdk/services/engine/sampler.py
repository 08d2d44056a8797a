#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.engine.sampler

从高斯噪声出发逐步去噪得到版型；补全时已知面片块占据前 k 个块，
每一步都用当前噪声水平重新加噪写回，最后一步之后写回原值。
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from gdk.core.exceptions import CapacityExceededException, LayoutMismatchException
from gdk.services.conditioning.bundle import ConditionBundle
from gdk.services.denoiser.model import predict_noise
from gdk.services.engine.bundle import RunBundle
from gdk.services.pattern.model import Pattern
from gdk.services.tokenizer.codec import DecodeReport, PatternCodec, TokenGrid


@dataclass
class SampleResult:
    pattern: Pattern
    values: np.ndarray
    report: DecodeReport
    known_rows: int = 0

    def to_grid(self, codec: PatternCodec, max_edges: int) -> TokenGrid:
        """按填充阈值补出掩码，便于写出二进制网格"""
        edge_mask = np.abs(self.values).max(axis=1) > codec.pad_threshold
        panel_mask = edge_mask.reshape(-1, max_edges).any(axis=1)
        return TokenGrid(values=self.values, panel_mask=panel_mask, edge_mask=edge_mask)


def _denoise(
    bundle: RunBundle,
    conditions: ConditionBundle,
    n_steps: int,
    seed: int,
    x0_known: Optional[np.ndarray] = None,
) -> np.ndarray:
    layout = bundle.layout
    scheduler = bundle.scheduler(n_steps)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((layout.seq_len, layout.token_width))
    k_rows = 0 if x0_known is None else len(x0_known)

    timesteps = [int(t) for t in scheduler.inference_timesteps]
    for i, t in enumerate(timesteps):
        if k_rows:
            x[:k_rows] = scheduler.add_noise(x0_known, rng.standard_normal(x0_known.shape), t)
        eps_hat = predict_noise(x, t, conditions, bundle.params).astype(np.float64)
        t_prev = timesteps[i + 1] if i + 1 < len(timesteps) else -1
        x = scheduler.step(eps_hat, t, t_prev, x, rng=rng if t_prev >= 0 else None)

    if k_rows:
        x[:k_rows] = x0_known
    return x


def sample(
    bundle: RunBundle,
    conditions: ConditionBundle,
    n_steps: int,
    seed: int,
    codec: Optional[PatternCodec] = None,
    name: str = "sample",
) -> SampleResult:
    """x_T ~ N(0, I) 经 n_steps 步反演后解码"""
    check_conditions(bundle, conditions)
    codec = codec or PatternCodec()
    values = _denoise(bundle, conditions, n_steps, seed)
    pattern, report = codec.decode_with_report(values, bundle.layout, bundle.stats, name=name)
    logger.debug(f"🎲 seed={seed} steps={n_steps} 模态={conditions.modality} → {len(pattern.panels)} 个面片")
    return SampleResult(pattern=pattern, values=values, report=report)


def complete(
    bundle: RunBundle,
    fragment: Pattern,
    conditions: ConditionBundle,
    n_steps: int,
    seed: int,
    codec: Optional[PatternCodec] = None,
    name: str = "completed",
) -> SampleResult:
    """已知面片按原顺序写入前 k 个块；k = 0 时与 sample 完全一致"""
    check_conditions(bundle, conditions)
    codec = codec or PatternCodec()
    layout = bundle.layout
    k = len(fragment.panels)
    if k > layout.max_panels:
        raise CapacityExceededException(
            f"已知面片数 {k} 超过布局容量 {layout.max_panels}",
            details={"panels": k, "max_panels": layout.max_panels},
        )
    if k == 0:
        values = _denoise(bundle, conditions, n_steps, seed)
    else:
        known = codec.encode(fragment, layout, bundle.stats)
        x0_known = known.values[: k * layout.max_edges_per_panel].copy()
        values = _denoise(bundle, conditions, n_steps, seed, x0_known=x0_known)
    pattern, report = codec.decode_with_report(values, layout, bundle.stats, name=name)
    logger.debug(f"🧩 补全: 已知 {k} 个面片 → 共 {len(pattern.panels)} 个面片")
    return SampleResult(
        pattern=pattern, values=values, report=report, known_rows=k * layout.max_edges_per_panel
    )


def sample_many(
    bundle: RunBundle,
    conditions: ConditionBundle,
    n_steps: int,
    seeds: Sequence[int],
    codec: Optional[PatternCodec] = None,
    threads: int = 1,
) -> List[SampleResult]:
    """多个种子并行采样，结果与 seeds 顺序一致"""
    if not seeds:
        return []
    codec = codec or PatternCodec()

    def one(seed: int) -> SampleResult:
        return sample(bundle, conditions, n_steps, seed, codec=codec, name=f"sample_{seed}")

    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def check_conditions(bundle: RunBundle, conditions: ConditionBundle) -> None:
    for feats in (conditions.text, conditions.image):
        if feats is not None and feats.width != bundle.denoiser_config.cond_dim:
            raise LayoutMismatchException(
                f"条件维度 {feats.width} 与检查点 {bundle.denoiser_config.cond_dim} 不一致"
            )


__all__ = ["SampleResult", "sample", "complete", "sample_many", "check_conditions"]
