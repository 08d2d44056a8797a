#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.denoiser.params

去噪器参数表。名称即检查点中的键，顺序固定::

    phi.w1 / phi.b1 / phi.w2 / phi.b2          token 投影 D→C→C
    time.w1 / time.b1 / time.w2 / time.b2      时间投影 C→C→C
    emb.panel (M×C) / emb.edge (N×C)           面片 / 边位置表
    null.text / null.image (1×cond_dim)        缺省模态的空 token
    blocks.{i}.ln{1,2,3}.{g,b}
    blocks.{i}.attn.{wq,wk,wv,wo,bo}
    blocks.{i}.cross.{wq,wk_text,wv_text,wk_image,wv_image,wo,bo}
    blocks.{i}.ffn.{w1,b1,w2,b2}
    final_ln.{g,b} / head.w / head.b
"""
from __future__ import annotations

from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np

from gdk.core.exceptions import CheckpointException
from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.numerics.checkpoint import load_checkpoint, save_checkpoint
from gdk.services.numerics.tensor import Tensor

INIT_STD = 0.02

Shape = Tuple[int, ...]


def parameter_shapes(config: DenoiserConfig) -> List[Tuple[str, Shape, str]]:
    """(名称, 形状, 初始化方式) 列表，初始化方式 ∈ {normal, zeros, ones}"""
    c, f, d, k = config.embed_dim, config.ffn_dim, config.token_width, config.cond_dim
    shapes: List[Tuple[str, Shape, str]] = [
        ("phi.w1", (d, c), "normal"),
        ("phi.b1", (c,), "zeros"),
        ("phi.w2", (c, c), "normal"),
        ("phi.b2", (c,), "zeros"),
        ("time.w1", (c, c), "normal"),
        ("time.b1", (c,), "zeros"),
        ("time.w2", (c, c), "normal"),
        ("time.b2", (c,), "zeros"),
        ("emb.panel", (config.max_panels, c), "normal"),
        ("emb.edge", (config.max_edges_per_panel, c), "normal"),
        ("null.text", (1, k), "normal"),
        ("null.image", (1, k), "normal"),
    ]
    for i in range(config.n_blocks):
        p = f"blocks.{i}"
        for ln in ("ln1", "ln2", "ln3"):
            shapes += [(f"{p}.{ln}.g", (c,), "ones"), (f"{p}.{ln}.b", (c,), "zeros")]
        shapes += [
            (f"{p}.attn.wq", (c, c), "normal"),
            (f"{p}.attn.wk", (c, c), "normal"),
            (f"{p}.attn.wv", (c, c), "normal"),
            (f"{p}.attn.wo", (c, c), "normal"),
            (f"{p}.attn.bo", (c,), "zeros"),
            (f"{p}.cross.wq", (c, c), "normal"),
            (f"{p}.cross.wk_text", (k, c), "normal"),
            (f"{p}.cross.wv_text", (k, c), "normal"),
            (f"{p}.cross.wk_image", (k, c), "normal"),
            (f"{p}.cross.wv_image", (k, c), "normal"),
            (f"{p}.cross.wo", (c, c), "normal"),
            (f"{p}.cross.bo", (c,), "zeros"),
            (f"{p}.ffn.w1", (c, f), "normal"),
            (f"{p}.ffn.b1", (f,), "zeros"),
            (f"{p}.ffn.w2", (f, c), "normal"),
            (f"{p}.ffn.b2", (c,), "zeros"),
        ]
    shapes += [
        ("final_ln.g", (c,), "ones"),
        ("final_ln.b", (c,), "zeros"),
        ("head.w", (c, d), "zeros"),
        ("head.b", (d,), "zeros"),
    ]
    return shapes


def truncated_normal(rng: np.random.Generator, shape: Shape, std: float = INIT_STD) -> np.ndarray:
    """截断在 ±2σ 的正态分布，越界样本重采样"""
    out = rng.standard_normal(shape)
    bad = np.abs(out) > 2.0
    while bad.any():
        out[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(out) > 2.0
    return out * std


class DenoiserParams:
    """有序的 名称 → 数组 参数表"""

    def __init__(self, config: DenoiserConfig, values: Mapping[str, np.ndarray]):
        self.config = config
        expected = parameter_shapes(config)
        missing = [name for name, _, _ in expected if name not in values]
        if missing:
            raise CheckpointException("参数缺失", details={"missing": missing[:10]})
        extra = sorted(set(values) - {name for name, _, _ in expected})
        if extra:
            raise CheckpointException("存在未知参数", details={"extra": extra[:10]})
        self.values: Dict[str, np.ndarray] = {}
        for name, shape, _ in expected:
            arr = np.asarray(values[name])
            if arr.shape != shape:
                raise CheckpointException(
                    f"参数 {name} 形状不匹配", details={"expected": list(shape), "actual": list(arr.shape)}
                )
            if not np.all(np.isfinite(arr)):
                raise CheckpointException(f"参数 {name} 含非有限值")
            self.values[name] = arr

    @classmethod
    def init(cls, config: DenoiserConfig, seed: int = 0, dtype=np.float32) -> "DenoiserParams":
        rng = np.random.default_rng(seed)
        values: Dict[str, np.ndarray] = {}
        for name, shape, how in parameter_shapes(config):
            if how == "normal":
                arr = truncated_normal(rng, shape)
            elif how == "ones":
                arr = np.ones(shape)
            else:
                arr = np.zeros(shape)
            values[name] = arr.astype(dtype)
        return cls(config, values)

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]

    @property
    def n_parameters(self) -> int:
        return int(sum(v.size for v in self.values.values()))

    def astype(self, dtype) -> "DenoiserParams":
        return DenoiserParams(self.config, {k: v.astype(dtype) for k, v in self.values.items()})

    def replace(self, values: Mapping[str, np.ndarray]) -> "DenoiserParams":
        """优化器更新后换一组同名数组"""
        return DenoiserParams(self.config, {**self.values, **values})

    def as_tensors(self, requires_grad: bool = False) -> Dict[str, Tensor]:
        return {k: Tensor(v, requires_grad=requires_grad, name=k) for k, v in self.values.items()}

    def save(self, path) -> None:
        save_checkpoint(self.values, path)

    @classmethod
    def load(cls, config: DenoiserConfig, path) -> "DenoiserParams":
        return cls(config, load_checkpoint(path))


__all__ = ["DenoiserParams", "parameter_shapes", "truncated_normal", "INIT_STD"]
