#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
语料相关命令：gen-dataset / stats / render-svg
"""

import argparse

from loguru import logger

from gdk.cli.common import CommandGroup, require_dir, require_file, seed_or
from gdk.services.pattern.model import load_pattern
from gdk.services.synthgen.corpus import generate_corpus, read_corpus, write_corpus
from gdk.services.synthgen.svg import save_svg
from gdk.services.tokenizer.layout import get_layout
from gdk.services.tokenizer.stats import compute_stats, save_stats

router = CommandGroup()


def _gen_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="样本条数")
    p.add_argument("--out", required=True, help="输出目录")


@router.command("gen-dataset", help="生成合成语料", arguments=_gen_dataset_args)
def gen_dataset(args: argparse.Namespace) -> int:
    seed = seed_or(args)
    logger.info(f"🚀 生成 {args.n} 条合成样本 (seed={seed})")
    write_corpus(generate_corpus(args.n, seed), args.out, seed)
    print(f"wrote {args.n} entries to {args.out}")
    return 0


def _stats_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="语料目录")
    p.add_argument("--preset", default="dresscode", help="token 布局预设")
    p.add_argument("--out", required=True, help="统计量 JSON 输出路径")


@router.command("stats", help="计算归一化统计量", arguments=_stats_args)
def stats(args: argparse.Namespace) -> int:
    layout = get_layout(args.preset)
    entries = read_corpus(require_dir(args.corpus, "语料目录"))
    save_stats(compute_stats([e.pattern for e in entries], layout), args.out)
    print(f"wrote stats for {len(entries)} patterns to {args.out}")
    return 0


def _svg_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, help="版型 JSON")
    p.add_argument("--out", required=True, help="SVG 输出路径")


@router.command("render-svg", help="把版型渲染为 SVG", arguments=_svg_args)
def render_svg(args: argparse.Namespace) -> int:
    pattern = load_pattern(require_file(args.input, "版型文件"))
    save_svg(pattern, args.out)
    print(f"wrote {args.out}")
    return 0
