#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
生成命令：sample / complete
"""

import argparse
from pathlib import Path

from gdk.cli.common import CommandGroup, builder_for, require_dir, require_file, resolve_threads, seed_or
from gdk.core.container import get_pattern_codec
from gdk.core.exceptions import UsageException
from gdk.services.engine.bundle import BEST_CHECKPOINT, RunBundle
from gdk.services.engine.sampler import SampleResult, complete as complete_pattern, sample_many
from gdk.services.pattern.model import load_pattern, save_pattern
from gdk.services.synthgen.svg import save_svg
from gdk.services.tokenizer.codec import PatternCodec
from gdk.services.tokenizer.grid_io import save_grid

router = CommandGroup()


def _shared_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--run", required=True, help="训练输出目录")
    p.add_argument("--checkpoint", default=BEST_CHECKPOINT, help="运行目录中的检查点文件名")
    p.add_argument("--text", default=None, help="文本条件")
    p.add_argument("--sketch", default=None, help="草图 PGM 路径")
    p.add_argument("--steps", type=int, default=None, help="去噪步数（缺省取运行配置）")
    p.add_argument("--out", required=True, help="版型 JSON 输出路径")
    p.add_argument("--svg", action="store_true", help="同时写出 SVG")
    p.add_argument("--grid", action="store_true", help="同时写出原始 token 网格")


def _load(args: argparse.Namespace):
    bundle = RunBundle.load(require_dir(args.run, "运行目录"), checkpoint=args.checkpoint)
    sketch = str(require_file(args.sketch, "草图文件")) if args.sketch else None
    conditions = builder_for(bundle.run_config).build(text=args.text, sketch=sketch)
    n_steps = args.steps or bundle.run_config.scheduler.inference_steps
    return bundle, conditions, n_steps


def _write(result: SampleResult, out: Path, bundle: RunBundle, codec: PatternCodec, args) -> None:
    save_pattern(result.pattern, out)
    if args.svg:
        save_svg(result.pattern, out.with_suffix(".svg"))
    if args.grid:
        layout = bundle.layout
        grid = result.to_grid(codec, layout.max_edges_per_panel)
        save_grid(grid, out.with_suffix(".tok"), layout.max_panels, layout.max_edges_per_panel)
    print(f"wrote {out} ({len(result.pattern.panels)} panels, {len(result.pattern.stitches)} stitches)")


def _sample_args(p: argparse.ArgumentParser) -> None:
    _shared_args(p)
    p.add_argument("--n-samples", type=int, default=1, help="样本数；> 1 时 --out 为目录")


@router.command("sample", help="条件采样生成版型", arguments=_sample_args)
def sample(args: argparse.Namespace) -> int:
    if args.n_samples < 1:
        raise UsageException(f"--n-samples 必须 ≥ 1: {args.n_samples}")
    bundle, conditions, n_steps = _load(args)
    codec = get_pattern_codec()
    seed = seed_or(args)
    seeds = [seed + i for i in range(args.n_samples)]
    results = sample_many(bundle, conditions, n_steps, seeds, codec=codec, threads=resolve_threads(args.threads))
    if args.n_samples == 1:
        _write(results[0], Path(args.out), bundle, codec, args)
    else:
        for s, result in zip(seeds, results):
            _write(result, Path(args.out) / f"sample_{s}.json", bundle, codec, args)
    return 0


def _complete_args(p: argparse.ArgumentParser) -> None:
    _shared_args(p)
    p.add_argument("--fragment", required=True, help="已知面片的版型 JSON")


@router.command("complete", help="在已知面片基础上补全版型", arguments=_complete_args)
def complete(args: argparse.Namespace) -> int:
    fragment = load_pattern(require_file(args.fragment, "已知面片文件"))
    bundle, conditions, n_steps = _load(args)
    codec = get_pattern_codec()
    result = complete_pattern(bundle, fragment, conditions, n_steps, seed_or(args), codec=codec)
    _write(result, Path(args.out), bundle, codec, args)
    return 0
