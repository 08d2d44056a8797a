#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
训练相关命令：train / gradcheck
"""

import argparse

from gdk.cli.common import CommandGroup, builder_for, require_dir, require_file, resolve_threads
from gdk.core.container import get_pattern_codec
from gdk.core.exceptions import NumericalException
from gdk.core.run_config import load_run_config
from gdk.services.engine.dataset import examples_from_corpus
from gdk.services.engine.diagnostics import GRADCHECK_TOL, MIN_COORDS, denoiser_gradcheck
from gdk.services.engine.trainer import Trainer
from gdk.services.synthgen.corpus import read_corpus
from gdk.services.tokenizer.stats import load_stats

router = CommandGroup()


def _train_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="运行配置 JSON")
    p.add_argument("--corpus", required=True, help="语料目录")
    p.add_argument("--out", required=True, help="运行输出目录")
    p.add_argument("--stats", default=None, help="已有统计量 JSON（缺省时由训练集计算）")
    p.add_argument("--max-steps", type=int, default=None, help="覆盖配置中的 max_steps")


@router.command("train", help="训练去噪器", arguments=_train_args)
def train(args: argparse.Namespace) -> int:
    config = load_run_config(require_file(args.config, "运行配置"))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.max_steps is not None:
        overrides["max_steps"] = args.max_steps
    if overrides:
        config = config.model_copy(update=overrides)

    examples = examples_from_corpus(read_corpus(require_dir(args.corpus, "语料目录")))
    stats = load_stats(require_file(args.stats, "统计量文件")) if args.stats else None
    trainer = Trainer(config, builder_for(config), get_pattern_codec(), threads=resolve_threads(args.threads))
    result = trainer.train(examples, stats=stats, run_dir=args.out)
    print(
        f"trained {result.steps} steps ({result.stop_reason}), "
        f"final loss {result.losses[-1]:.6f}, best {result.best_loss:.6f}"
    )
    return 0


def _gradcheck_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="运行配置 JSON")
    p.add_argument("--coords", type=int, default=MIN_COORDS, help="最少检查的参数坐标数")
    p.add_argument("--tol", type=float, default=GRADCHECK_TOL, help="相对误差上限")


@router.command("gradcheck", help="去噪器解析梯度与中心差分比较", arguments=_gradcheck_args)
def gradcheck(args: argparse.Namespace) -> int:
    config = load_run_config(require_file(args.config, "运行配置"))
    seed = config.seed if args.seed is None else args.seed
    result = denoiser_gradcheck(config.denoiser_config(), builder_for(config), seed=seed, min_coords=args.coords)
    print(f"max relative error {result.max_rel_error:.3e} over {result.n_checked} coordinates")
    if not result.passed(args.tol):
        raise NumericalException(
            f"梯度检查失败: {result.max_rel_error:.3e} ≥ {args.tol}",
            component="gradcheck",
            details={"worst": str(result.worst)},
        )
    return 0
