#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.numerics.checkpoint

参数检查点二进制格式（小端）::

    magic  8 字节  b"GDKCKPT\\0"
    u32    版本
    u32    参数个数
    逐参数:
      u32 名称字节数 + UTF-8 名称
      u32 维数 + 每维 u32
      f32 数据（行优先）
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np
from loguru import logger

from gdk.core.exceptions import CheckpointException

MAGIC = b"GDKCKPT\x00"
VERSION = 1


def checkpoint_to_bytes(params: Mapping[str, np.ndarray]) -> bytes:
    chunks = [MAGIC, struct.pack("<II", VERSION, len(params))]
    for name, value in params.items():
        encoded = name.encode("utf-8")
        arr = np.ascontiguousarray(value, dtype="<f4")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes())
    return b"".join(chunks)


def checkpoint_from_bytes(blob: bytes) -> Dict[str, np.ndarray]:
    if blob[:8] != MAGIC:
        raise CheckpointException("检查点 magic 不匹配")
    try:
        version, count = struct.unpack_from("<II", blob, 8)
        if version != VERSION:
            raise CheckpointException(f"不支持的检查点版本 {version}")
        offset = 16
        params: Dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            if offset + name_len > len(blob):
                raise CheckpointException("参数名被截断", details={"offset": offset})
            try:
                name = blob[offset : offset + name_len].decode("utf-8")
            except UnicodeDecodeError as e:
                raise CheckpointException(f"参数名不是合法的 UTF-8: {e}", details={"offset": offset})
            offset += name_len
            (ndim,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            shape = struct.unpack_from(f"<{ndim}I", blob, offset)
            offset += 4 * ndim
            n = int(np.prod(shape)) if ndim else 1
            if offset + 4 * n > len(blob):
                raise CheckpointException(f"参数 {name} 数据被截断")
            params[name] = np.frombuffer(blob, dtype="<f4", count=n, offset=offset).reshape(shape).copy()
            offset += 4 * n
    except struct.error as e:
        raise CheckpointException(f"检查点文件被截断: {e}")
    if offset != len(blob):
        raise CheckpointException("检查点末尾存在多余字节")
    return params


def save_checkpoint(params: Mapping[str, np.ndarray], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(checkpoint_to_bytes(params))
    logger.debug(f"📦 检查点已写入 {path}（{len(params)} 个参数）")


def load_checkpoint(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointException(f"检查点不存在: {path}")
    return checkpoint_from_bytes(path.read_bytes())


__all__ = ["MAGIC", "VERSION", "checkpoint_to_bytes", "checkpoint_from_bytes", "save_checkpoint", "load_checkpoint"]
