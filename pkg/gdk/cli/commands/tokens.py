#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
token 化命令：tokenize / detokenize
"""

import argparse

from gdk.cli.common import CommandGroup, require_file
from gdk.core.container import get_pattern_codec
from gdk.core.exceptions import LayoutMismatchException
from gdk.services.pattern.model import load_pattern, save_pattern
from gdk.services.tokenizer.grid_io import load_grid, save_grid
from gdk.services.tokenizer.layout import get_layout
from gdk.services.tokenizer.stats import load_stats

router = CommandGroup()


def _tokenize_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default="dresscode", help="token 布局预设")
    p.add_argument("--in", dest="input", required=True, help="版型 JSON")
    p.add_argument("--stats", required=True, help="统计量 JSON")
    p.add_argument("--out", required=True, help="二进制网格输出路径")
    p.add_argument("--shuffle", action="store_true", help="用 --seed 打乱面片顺序")


@router.command("tokenize", help="版型 JSON → token 网格", arguments=_tokenize_args)
def tokenize(args: argparse.Namespace) -> int:
    layout = get_layout(args.preset)
    pattern = load_pattern(require_file(args.input, "版型文件"))
    stats = load_stats(require_file(args.stats, "统计量文件"))
    shuffle_seed = (args.seed or 0) if args.shuffle else None
    grid = get_pattern_codec().encode(pattern, layout, stats, shuffle_seed=shuffle_seed)
    save_grid(grid, args.out, layout.max_panels, layout.max_edges_per_panel)
    print(f"wrote {layout.seq_len} rows x {layout.token_width} to {args.out}")
    return 0


def _detokenize_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, help="二进制网格")
    p.add_argument("--stats", required=True, help="统计量 JSON")
    p.add_argument("--out", required=True, help="版型 JSON 输出路径")
    p.add_argument("--name", default="decoded", help="输出版型名")


@router.command("detokenize", help="token 网格 → 版型 JSON", arguments=_detokenize_args)
def detokenize(args: argparse.Namespace) -> int:
    grid, m, n = load_grid(require_file(args.input, "网格文件"))
    stats = load_stats(require_file(args.stats, "统计量文件"))
    layout = stats.layout
    if (m, n) != (layout.max_panels, layout.max_edges_per_panel):
        raise LayoutMismatchException(
            f"网格 M×N={m}×{n} 与统计量布局 {layout.max_panels}×{layout.max_edges_per_panel} 不一致"
        )
    pattern, report = get_pattern_codec().decode_with_report(grid, layout, stats, name=args.name)
    save_pattern(pattern, args.out)
    print(f"decoded {len(pattern.panels)} panels ({report.dropped_panels} dropped) to {args.out}")
    return 0
