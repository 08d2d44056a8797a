#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.engine.bundle

训练产物目录::

    <run>/config.json      解析后的 RunConfig
    <run>/stats.json       归一化统计量
    <run>/checkpoint.bin   验证损失最优的参数
    <run>/last.bin         最后一步的参数
    <run>/loss.csv         step,loss,modality
    <run>/val_loss.csv     epoch,loss
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

from loguru import logger

from gdk.core.exceptions import CheckpointException, LayoutMismatchException
from gdk.core.run_config import RunConfig, load_run_config, save_run_config
from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.denoiser.params import DenoiserParams
from gdk.services.diffusion.scheduler import DDPMScheduler
from gdk.services.tokenizer.layout import TokenLayout
from gdk.services.tokenizer.stats import NormStats, load_stats, save_stats

CONFIG_FILE = "config.json"
STATS_FILE = "stats.json"
BEST_CHECKPOINT = "checkpoint.bin"
LAST_CHECKPOINT = "last.bin"
LOSS_CSV = "loss.csv"
VAL_LOSS_CSV = "val_loss.csv"


@dataclass
class RunBundle:
    """采样 / 补全所需的一切：配置、统计量、参数"""

    run_config: RunConfig
    stats: NormStats
    params: DenoiserParams

    def __post_init__(self) -> None:
        layout = self.run_config.token_layout
        self.stats.ensure_layout(layout)
        if not self.params.config.matches_layout(layout):
            raise LayoutMismatchException("去噪器配置与 token 布局不一致")

    @property
    def layout(self) -> TokenLayout:
        return self.run_config.token_layout

    @property
    def denoiser_config(self) -> DenoiserConfig:
        return self.params.config

    def scheduler(self, n_steps: int | None = None) -> DDPMScheduler:
        return DDPMScheduler.from_config(self.run_config.scheduler, n_steps)

    def save(self, run_dir: Union[str, Path], checkpoint: str = BEST_CHECKPOINT) -> Path:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        save_run_config(self.run_config, run_dir / CONFIG_FILE)
        save_stats(self.stats, run_dir / STATS_FILE)
        self.params.save(run_dir / checkpoint)
        return run_dir

    @classmethod
    def load(cls, run_dir: Union[str, Path], checkpoint: str = BEST_CHECKPOINT) -> "RunBundle":
        run_dir = Path(run_dir)
        if not run_dir.is_dir():
            raise CheckpointException(f"运行目录不存在: {run_dir}")
        run_config = load_run_config(run_dir / CONFIG_FILE)
        stats = load_stats(run_dir / STATS_FILE)
        params = DenoiserParams.load(run_config.denoiser_config(), run_dir / checkpoint)
        logger.info(f"📦 已加载运行 {run_dir}（{params.n_parameters} 个参数）")
        return cls(run_config=run_config, stats=stats, params=params)


__all__ = [
    "RunBundle",
    "CONFIG_FILE",
    "STATS_FILE",
    "BEST_CHECKPOINT",
    "LAST_CHECKPOINT",
    "LOSS_CSV",
    "VAL_LOSS_CSV",
]
