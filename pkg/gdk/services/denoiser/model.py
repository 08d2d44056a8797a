#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.denoiser.model

DiT 去噪器前向。

* 嵌入：x_j = φ(Ẽ_j) + Emb_P(i) + Emb_E(j) + 𝒯(t)，行号 i·N + j。
* 每块前置 LayerNorm：自注意力 → 解耦交叉注意力 → 前馈，均带残差。
* 交叉注意力共享查询投影，文本 / 草图各自的 K、V；两路输出相加后再做输出投影。
  缺省模态用可学习的 1×cond_dim 空 token 代替。
* 不做填充掩码，填充行与真实行同样参与注意力。
"""
from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from gdk.core.exceptions import ConditionException, LayoutMismatchException, NumericalException
from gdk.services.conditioning.bundle import ConditionBundle, ModalityFeatures
from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.denoiser.params import DenoiserParams
from gdk.services.numerics import tensor as tn
from gdk.services.numerics.tensor import Tensor

Params = Mapping[str, Tensor]


def time_embedding(t: int, dim: int) -> np.ndarray:
    """正余弦时间编码：前半 cos，后半 sin，频率 10000^{-2k/dim}"""
    if t < 0:
        raise NumericalException(f"时间步必须非负: {t}")
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half, dtype=np.float64) * 2.0 / dim)
    args = float(t) * freqs
    return np.concatenate([np.cos(args), np.sin(args)])


def linear(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    y = tn.matmul(x, w)
    return tn.add(y, b) if b is not None else y


def two_layer(x: Tensor, params: Params, prefix: str) -> Tensor:
    hidden = tn.gelu(linear(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"]))
    return linear(hidden, params[f"{prefix}.w2"], params[f"{prefix}.b2"])


def _split_heads(x: Tensor, n_heads: int) -> Tensor:
    rows, width = x.shape
    return tn.transpose(tn.reshape(x, (rows, n_heads, width // n_heads)), (1, 0, 2))


def _merge_heads(x: Tensor) -> Tensor:
    heads, rows, dim = x.shape
    return tn.reshape(tn.transpose(x, (1, 0, 2)), (rows, heads * dim))


def attention(q: Tensor, k: Tensor, v: Tensor, n_heads: int) -> Tensor:
    """多头缩放点积注意力，缩放 1/√(C/heads)，无掩码"""
    qh, kh, vh = (_split_heads(x, n_heads) for x in (q, k, v))
    head_dim = q.shape[-1] // n_heads
    scores = tn.scale(tn.matmul(qh, tn.transpose(kh, (0, 2, 1))), 1.0 / np.sqrt(head_dim))
    return _merge_heads(tn.matmul(tn.softmax_rows(scores), vh))


def attention_weights(q: np.ndarray, k: np.ndarray, n_heads: int) -> np.ndarray:
    """(heads, Lq, Lk) 注意力权重，供检查与可视化"""
    head_dim = q.shape[-1] // n_heads
    qh = q.reshape(q.shape[0], n_heads, head_dim).transpose(1, 0, 2)
    kh = k.reshape(k.shape[0], n_heads, head_dim).transpose(1, 0, 2)
    return tn.softmax_rows(Tensor(qh @ kh.transpose(0, 2, 1) / np.sqrt(head_dim))).data


def embed_tokens(noised_grid: Tensor, t: int, params: Params, config: DenoiserConfig) -> Tensor:
    if noised_grid.shape != (config.seq_len, config.token_width):
        raise LayoutMismatchException(
            f"网格形状 {noised_grid.shape} 与配置 {(config.seq_len, config.token_width)} 不一致"
        )
    m, n = config.max_panels, config.max_edges_per_panel
    dtype = params["phi.w1"].dtype
    tokens = two_layer(noised_grid, params, "phi")
    panel_pos = tn.embedding_lookup(params["emb.panel"], np.repeat(np.arange(m), n))
    edge_pos = tn.embedding_lookup(params["emb.edge"], np.tile(np.arange(n), m))
    temb = Tensor(time_embedding(t, config.embed_dim)[None, :].astype(dtype))
    time_proj = two_layer(temb, params, "time")
    return tn.add(tn.add(tn.add(tokens, panel_pos), edge_pos), time_proj)


def _modality_rows(
    features: Optional[ModalityFeatures], null_token: Tensor, config: DenoiserConfig
) -> Tensor:
    if features is None:
        return null_token
    rows = features.rows()
    if rows.shape[-1] != config.cond_dim:
        raise ConditionException(
            f"条件特征宽度 {rows.shape[-1]} 与 cond_dim={config.cond_dim} 不一致"
        )
    return Tensor(rows.astype(null_token.dtype))


def cross_attention_mix(
    z: Tensor,
    text_rows: Tensor,
    image_rows: Tensor,
    params: Params,
    prefix: str,
    n_heads: int,
) -> Tensor:
    """两路注意力输出之和（输出投影之前）"""
    q = tn.matmul(z, params[f"{prefix}.wq"])
    text_out = attention(
        q,
        tn.matmul(text_rows, params[f"{prefix}.wk_text"]),
        tn.matmul(text_rows, params[f"{prefix}.wv_text"]),
        n_heads,
    )
    image_out = attention(
        q,
        tn.matmul(image_rows, params[f"{prefix}.wk_image"]),
        tn.matmul(image_rows, params[f"{prefix}.wv_image"]),
        n_heads,
    )
    return tn.add(text_out, image_out)


def decoupled_cross_attention(
    z: Tensor,
    conditions: ConditionBundle,
    params: Params,
    config: DenoiserConfig,
    prefix: str = "blocks.0.cross",
) -> Tensor:
    text_rows = _modality_rows(conditions.text, params["null.text"], config)
    image_rows = _modality_rows(conditions.image, params["null.image"], config)
    mixed = cross_attention_mix(z, text_rows, image_rows, params, prefix, config.n_heads)
    return linear(mixed, params[f"{prefix}.wo"], params[f"{prefix}.bo"])


def self_attention(z: Tensor, params: Params, prefix: str, n_heads: int) -> Tensor:
    q = tn.matmul(z, params[f"{prefix}.wq"])
    k = tn.matmul(z, params[f"{prefix}.wk"])
    v = tn.matmul(z, params[f"{prefix}.wv"])
    return linear(attention(q, k, v, n_heads), params[f"{prefix}.wo"], params[f"{prefix}.bo"])


def _ln(x: Tensor, params: Params, prefix: str) -> Tensor:
    return tn.layer_norm(x, params[f"{prefix}.g"], params[f"{prefix}.b"])


def forward(
    noised_grid: Tensor,
    t: int,
    conditions: ConditionBundle,
    params: Params,
    config: DenoiserConfig,
) -> Tensor:
    """预测噪声，形状与输入网格相同"""
    x = embed_tokens(noised_grid, t, params, config)
    for i in range(config.n_blocks):
        p = f"blocks.{i}"
        attn_in = _ln(x, params, f"{p}.ln1")
        x = tn.add(x, self_attention(attn_in, params, f"{p}.attn", config.n_heads))
        cross_in = _ln(x, params, f"{p}.ln2")
        x = tn.add(x, decoupled_cross_attention(cross_in, conditions, params, config, f"{p}.cross"))
        x = tn.add(x, two_layer(_ln(x, params, f"{p}.ln3"), params, f"{p}.ffn"))
    return linear(_ln(x, params, "final_ln"), params["head.w"], params["head.b"])


def predict_noise(
    noised_grid: np.ndarray, t: int, conditions: ConditionBundle, params: DenoiserParams
) -> np.ndarray:
    """推理入口：不建图"""
    dtype = params["phi.w1"].dtype
    out = forward(Tensor(noised_grid.astype(dtype)), t, conditions, params.as_tensors(), params.config)
    return out.data


def denoising_loss(
    params: Params,
    x_t: np.ndarray,
    eps: np.ndarray,
    t: int,
    conditions: ConditionBundle,
    config: DenoiserConfig,
) -> Tensor:
    """‖ε − ε_θ(x_t, t, c)‖² 对网格所有元素求均值（含填充行）"""
    dtype = params["phi.w1"].dtype
    pred = forward(Tensor(x_t.astype(dtype)), t, conditions, params, config)
    return tn.mse_loss(pred, Tensor(eps.astype(dtype)))


__all__ = [
    "time_embedding",
    "embed_tokens",
    "attention",
    "attention_weights",
    "cross_attention_mix",
    "decoupled_cross_attention",
    "self_attention",
    "forward",
    "predict_noise",
    "denoising_loss",
]
