#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
评估命令：eval / benchmark
"""

import argparse
import json
from pathlib import Path
from typing import List, Tuple

from gdk.cli.common import CommandGroup, builder_for, require_dir, resolve_threads, seed_or
from gdk.core.container import get_pattern_codec
from gdk.core.exceptions import ConfigException, UsageException
from gdk.services.engine.benchmark import SCHEMES, benchmark as run_benchmark
from gdk.services.engine.bundle import BEST_CHECKPOINT, RunBundle
from gdk.services.engine.dataset import examples_from_corpus, split_dataset
from gdk.services.metrics.report import evaluate, format_table
from gdk.services.pattern.model import Pattern, load_pattern
from gdk.services.synthgen.corpus import MANIFEST, read_corpus
from gdk.utils.json_utils import dumps_canonical

router = CommandGroup()


def collect_patterns(path: str) -> List[Tuple[str, Pattern]]:
    """单个版型文件、语料目录（含清单）或版型 JSON 目录 → [(键, 版型)]，按键排序"""
    root = Path(path)
    if root.is_file():
        return [(root.stem, load_pattern(root))]
    if not root.is_dir():
        raise UsageException(f"路径不存在: {root}")
    manifest = root / MANIFEST
    if manifest.is_file():
        try:
            ids = [item["id"] for item in json.loads(manifest.read_text(encoding="utf-8"))["entries"]]
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ConfigException(f"语料清单无效: {manifest}", details={"error": str(e)}) from e
        return sorted((i, load_pattern(root / i / "pattern.json")) for i in ids)
    files = sorted(p for p in root.rglob("*.json") if p.name != MANIFEST)
    if not files:
        raise UsageException(f"目录中没有版型 JSON: {root}")
    return [(str(p.relative_to(root).with_suffix("")), load_pattern(p)) for p in files]


def pair_patterns(pred: List[Tuple[str, Pattern]], gt: List[Tuple[str, Pattern]]) -> List[Tuple[Pattern, Pattern]]:
    if len(pred) == 1 and len(gt) == 1:
        return [(pred[0][1], gt[0][1])]
    pred_map, gt_map = dict(pred), dict(gt)
    if set(pred_map) != set(gt_map):
        missing = sorted(set(gt_map) ^ set(pred_map))
        raise ConfigException("预测与 GT 的样本不一一对应", details={"unpaired": missing[:10]})
    return [(pred_map[k], gt_map[k]) for k in sorted(gt_map)]


def _eval_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pred", required=True, help="预测版型（文件或目录）")
    p.add_argument("--gt", required=True, help="GT 版型（文件或目录）")
    p.add_argument("--label", default="eval", help="报告标签")
    p.add_argument("--out", default=None, help="报告 JSON 输出路径")


@router.command("eval", help="预测版型与 GT 的指标", arguments=_eval_args)
def eval_(args: argparse.Namespace) -> int:
    pairs = pair_patterns(collect_patterns(args.pred), collect_patterns(args.gt))
    report = evaluate(pairs, label=args.label, threads=resolve_threads(args.threads))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report.to_json(), encoding="utf-8")
    print(report.to_table(), end="")
    return 0


def _benchmark_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--run", required=True, help="训练输出目录")
    p.add_argument("--checkpoint", default=BEST_CHECKPOINT, help="检查点文件名")
    p.add_argument("--corpus", required=True, help="语料目录")
    p.add_argument("--scheme", action="append", choices=sorted(SCHEMES), help="条件方案，可重复")
    p.add_argument("--steps", type=int, action="append", help="去噪步数，可重复")
    p.add_argument("--split", choices=["all", "test"], default="all", help="评估全部样本或测试集")
    p.add_argument("--out", default=None, help="报告 JSON 输出路径")


@router.command("benchmark", help="按条件方案与步数批量评估", arguments=_benchmark_args)
def benchmark(args: argparse.Namespace) -> int:
    bundle = RunBundle.load(require_dir(args.run, "运行目录"), checkpoint=args.checkpoint)
    examples = examples_from_corpus(read_corpus(require_dir(args.corpus, "语料目录")))
    if args.split == "test":
        _, _, test_idx = split_dataset(len(examples), bundle.run_config.seed)
        examples = [examples[i] for i in test_idx]
    if not examples:
        raise UsageException("没有可评估的样本")

    builder = builder_for(bundle.run_config)
    codec = get_pattern_codec()
    threads = resolve_threads(args.threads)
    seed = seed_or(args)
    schemes = args.scheme or list(SCHEMES)
    steps = args.steps or [bundle.run_config.scheduler.inference_steps]
    reports = [
        run_benchmark(bundle, examples, scheme, n, seed, builder, codec=codec, threads=threads)
        for scheme in schemes
        for n in steps
    ]
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(dumps_canonical([json.loads(r.to_json()) for r in reports]), encoding="utf-8")
    print(format_table(reports), end="")
    return 0
