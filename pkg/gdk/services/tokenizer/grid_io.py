#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
TokenGrid 二进制格式

布局：16 字节头（8 字节魔数 + u32 版本 + u32 保留），u32 M、N、D，
行优先小端 f32 数值，最后是按位打包的 panel_mask 与 edge_mask。
"""

import struct
from pathlib import Path
from typing import Tuple

import numpy as np

from gdk.core.exceptions import LayoutMismatchException
from gdk.services.tokenizer.codec import TokenGrid

MAGIC = b"GDKGRID\x00"
VERSION = 1
_HEADER = struct.Struct("<8sII")
_DIMS = struct.Struct("<III")


def grid_to_bytes(grid: TokenGrid, max_panels: int, max_edges: int) -> bytes:
    values = np.ascontiguousarray(grid.values, dtype="<f4")
    rows, width = values.shape
    if rows != max_panels * max_edges:
        raise LayoutMismatchException(f"网格行数 {rows} 与 M·N={max_panels * max_edges} 不一致")
    return b"".join(
        [
            _HEADER.pack(MAGIC, VERSION, 0),
            _DIMS.pack(max_panels, max_edges, width),
            values.tobytes(order="C"),
            np.packbits(grid.panel_mask.astype(np.uint8), bitorder="little").tobytes(),
            np.packbits(grid.edge_mask.astype(np.uint8), bitorder="little").tobytes(),
        ]
    )


def grid_from_bytes(data: bytes) -> Tuple[TokenGrid, int, int]:
    """返回 (网格, M, N)"""
    if len(data) < _HEADER.size + _DIMS.size:
        raise LayoutMismatchException("网格文件过短")
    magic, version, _ = _HEADER.unpack_from(data, 0)
    if magic != MAGIC or version != VERSION:
        raise LayoutMismatchException("网格文件魔数或版本不匹配", details={"version": version})
    m, n, d = _DIMS.unpack_from(data, _HEADER.size)

    offset = _HEADER.size + _DIMS.size
    n_values = m * n * d
    panel_bytes = (m + 7) // 8
    edge_bytes = (m * n + 7) // 8
    if len(data) != offset + 4 * n_values + panel_bytes + edge_bytes:
        raise LayoutMismatchException(
            "网格文件长度与头部声明不一致", details={"size": len(data), "m": m, "n": n, "d": d}
        )
    values = np.frombuffer(data, dtype="<f4", count=n_values, offset=offset).reshape(m * n, d)
    offset += 4 * n_values

    raw = np.frombuffer(data, dtype=np.uint8, offset=offset)
    panel_mask = np.unpackbits(raw[:panel_bytes], bitorder="little")[:m].astype(bool)
    edge_mask = np.unpackbits(raw[panel_bytes:], bitorder="little")[: m * n].astype(bool)

    grid = TokenGrid(values=values.astype(np.float64), panel_mask=panel_mask, edge_mask=edge_mask)
    return grid, m, n


def save_grid(grid: TokenGrid, path: Path | str, max_panels: int, max_edges: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(grid_to_bytes(grid, max_panels, max_edges))
    return path


def load_grid(path: Path | str) -> Tuple[TokenGrid, int, int]:
    return grid_from_bytes(Path(path).read_bytes())
