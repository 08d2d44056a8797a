#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.engine.trainer

去噪训练循环。

每个 batch:
  1. 按调度确定条件模态（round_robin 时依次为 image → text → both）。
  2. 串行地为每个样本抽取 面片打乱种子、t ∈ [0, T)、ε、文本级别，编码并加噪。
  3. 各样本的前向 + 反向在线程池中并行，梯度按样本顺序求均值。
  4. AdamW 更新。

每个 epoch 结束时用验证集（没有则用本 epoch 训练损失均值）驱动早停与最优检查点。
随机数全部来自同一个以 ``seed`` 初始化的生成器，线程数不影响结果。
"""
from __future__ import annotations

import csv
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from gdk.core.exceptions import ConfigException, NumericalException
from gdk.core.run_config import RunConfig, save_run_config
from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.bundle import ConditionBundle, ModalityFeatures
from gdk.services.denoiser.model import denoising_loss
from gdk.services.denoiser.params import DenoiserParams
from gdk.services.diffusion.scheduler import DDPMScheduler
from gdk.services.engine.bundle import (
    BEST_CHECKPOINT,
    CONFIG_FILE,
    LAST_CHECKPOINT,
    LOSS_CSV,
    STATS_FILE,
    VAL_LOSS_CSV,
)
from gdk.services.engine.dataset import TrainingExample, check_capacity, split_dataset
from gdk.services.numerics.optim import AdamWState, adamw_step
from gdk.services.numerics.tensor import backward
from gdk.services.tokenizer.codec import PatternCodec
from gdk.services.tokenizer.stats import NormStats, compute_stats, save_stats

MODALITY_CYCLE: Tuple[str, ...] = ("image", "text", "both")
MOVING_WINDOW = 50


def modality_for_batch(schedule: str, batch_index: int) -> str:
    if schedule == "round_robin":
        return MODALITY_CYCLE[batch_index % len(MODALITY_CYCLE)]
    return schedule


@dataclass(frozen=True)
class LossRecord:
    step: int
    loss: float
    modality: str


@dataclass
class TrainResult:
    params: DenoiserParams
    best_params: DenoiserParams
    stats: NormStats
    records: List[LossRecord] = field(default_factory=list)
    val_losses: List[Tuple[int, float]] = field(default_factory=list)
    best_loss: float = float("inf")
    steps: int = 0
    stop_reason: str = "epochs"

    @property
    def losses(self) -> List[float]:
        return [r.loss for r in self.records]


@dataclass
class _Job:
    x_t: np.ndarray
    eps: np.ndarray
    t: int
    conditions: ConditionBundle


class _FeatureCache:
    """每个样本的文本（两级）与草图特征只编码一次"""

    def __init__(self, builder: ConditionBuilder):
        self.builder = builder
        self._text: Dict[Tuple[str, str], ModalityFeatures] = {}
        self._image: Dict[str, ModalityFeatures] = {}

    def conditions(self, ex: TrainingExample, modality: str, level: str) -> ConditionBundle:
        text = image = None
        if modality in ("text", "both"):
            key = (ex.entry_id, level)
            if key not in self._text:
                self._text[key] = self.builder.text_encoder.encode(ex.caption(level))
            text = self._text[key]
        if modality in ("image", "both"):
            if ex.entry_id not in self._image:
                self._image[ex.entry_id] = self.builder.sketch_encoder.encode(ex.sketch)
            image = self._image[ex.entry_id]
        return ConditionBundle(text=text, image=image)


class Trainer:
    """单进程训练器；batch 内样本并行，优化器步为串行屏障"""

    def __init__(
        self,
        config: RunConfig,
        builder: ConditionBuilder,
        codec: PatternCodec,
        threads: int = 1,
    ):
        if builder.cond_dim != config.cond_dim:
            raise ConfigException(
                f"条件维度不一致: 编码器 {builder.cond_dim} vs 运行配置 {config.cond_dim}"
            )
        self.config = config
        self.layout = config.token_layout
        self.denoiser_config = config.denoiser_config()
        self.scheduler = DDPMScheduler.from_config(config.scheduler)
        self.codec = codec
        self.features = _FeatureCache(builder)
        self.threads = max(1, threads)

    # ------------------------------------------------------------------ per-sample

    def _prepare(
        self,
        ex: TrainingExample,
        modality: str,
        rng: np.random.Generator,
        stats: NormStats,
        shuffle: bool = True,
    ) -> _Job:
        shuffle_seed = int(rng.integers(0, 2**32)) if shuffle else None
        t = int(rng.integers(0, self.scheduler.T))
        eps = rng.standard_normal((self.layout.seq_len, self.layout.token_width))
        level = self.config.caption_levels[int(rng.integers(len(self.config.caption_levels)))]
        grid = self.codec.encode(ex.pattern, self.layout, stats, shuffle_seed=shuffle_seed)
        x_t = self.scheduler.add_noise(grid.values, eps, t)
        return _Job(x_t=x_t, eps=eps, t=t, conditions=self.features.conditions(ex, modality, level))

    def _loss_and_grads(self, params: DenoiserParams, job: _Job) -> Tuple[float, Dict[str, np.ndarray]]:
        tensors = params.as_tensors(requires_grad=True)
        loss = denoising_loss(tensors, job.x_t, job.eps, job.t, job.conditions, self.denoiser_config)
        return float(loss.data), backward(loss).by_name()

    def _loss_only(self, params: DenoiserParams, job: _Job) -> float:
        loss = denoising_loss(
            params.as_tensors(), job.x_t, job.eps, job.t, job.conditions, self.denoiser_config
        )
        return float(loss.data)

    # ------------------------------------------------------------------ batch

    def _batch_step(
        self,
        pool: Optional[ThreadPoolExecutor],
        params: DenoiserParams,
        jobs: Sequence[_Job],
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        if pool is not None and len(jobs) > 1:
            results = list(pool.map(lambda job: self._loss_and_grads(params, job), jobs))
        else:
            results = [self._loss_and_grads(params, job) for job in jobs]

        loss = float(np.mean([r[0] for r in results]))
        grads: Dict[str, np.ndarray] = {}
        for name in params:
            acc = None
            for _, g in results:
                if name in g:
                    acc = g[name].copy() if acc is None else acc + g[name]
            if acc is not None:
                grads[name] = acc / len(results)
        return loss, grads

    def validation_loss(
        self, params: DenoiserParams, examples: Sequence[TrainingExample], stats: NormStats
    ) -> float:
        """固定噪声流：每次评估都从同一种子出发，三种模态各算一次"""
        rng = np.random.default_rng([self.config.seed, 1])
        losses = [
            self._loss_only(params, self._prepare(ex, modality, rng, stats, shuffle=False))
            for ex in examples
            for modality in MODALITY_CYCLE
        ]
        return float(np.mean(losses))

    # ------------------------------------------------------------------ loop

    def train(
        self,
        examples: Sequence[TrainingExample],
        stats: Optional[NormStats] = None,
        run_dir: Optional[Union[str, Path]] = None,
    ) -> TrainResult:
        if not examples:
            raise ConfigException("训练数据集为空")
        check_capacity(examples, self.layout)
        cfg = self.config

        if cfg.use_splits:
            train_idx, val_idx, _ = split_dataset(len(examples), cfg.seed)
        else:
            train_idx, val_idx = list(range(len(examples))), []
        train_set = [examples[i] for i in train_idx]
        val_set = [examples[i] for i in val_idx]

        if stats is None:
            stats = compute_stats([ex.pattern for ex in train_set], self.layout)
        stats.ensure_layout(self.layout)

        run_path = Path(run_dir) if run_dir is not None else None
        if run_path is not None:
            run_path.mkdir(parents=True, exist_ok=True)
            save_run_config(cfg, run_path / CONFIG_FILE)
            save_stats(stats, run_path / STATS_FILE)

        rng = np.random.default_rng(cfg.seed)
        params = DenoiserParams.init(self.denoiser_config, seed=cfg.seed)
        state = AdamWState.zeros_like(params.values)
        result = TrainResult(params=params, best_params=params, stats=stats)
        window: deque = deque(maxlen=MOVING_WINDOW)
        patience = 0
        batch_index = 0

        logger.info(
            f"🚀 开始训练: {len(train_set)} 训练 / {len(val_set)} 验证, "
            f"{params.n_parameters} 个参数, batch={cfg.batch_size}, threads={self.threads}"
        )
        pool = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None
        try:
            for epoch in range(cfg.epochs):
                order = rng.permutation(len(train_set))
                epoch_losses: List[float] = []
                stop = None
                for start in range(0, len(order), cfg.batch_size):
                    modality = modality_for_batch(cfg.modality_schedule, batch_index)
                    batch = [train_set[int(i)] for i in order[start : start + cfg.batch_size]]
                    jobs = [self._prepare(ex, modality, rng, stats) for ex in batch]
                    loss, grads = self._batch_step(pool, params, jobs)
                    if not np.isfinite(loss):
                        raise NumericalException(
                            f"训练在第 {result.steps} 步发散",
                            component="trainer",
                            details={"step": result.steps, "loss": loss, "modality": modality},
                        )

                    new_values, state = adamw_step(
                        params.values, grads, state, lr=cfg.lr, betas=cfg.betas, weight_decay=cfg.weight_decay
                    )
                    bad = [k for k, v in new_values.items() if not np.all(np.isfinite(v))]
                    if bad:
                        raise NumericalException(
                            f"第 {result.steps} 步更新后参数出现非有限值",
                            component="trainer",
                            details={"params": bad[:5]},
                        )
                    params = params.replace(new_values)

                    result.records.append(LossRecord(step=result.steps, loss=loss, modality=modality))
                    epoch_losses.append(loss)
                    window.append(loss)
                    result.steps += 1
                    batch_index += 1
                    if result.steps % cfg.log_every == 0:
                        logger.info(
                            f"📈 step {result.steps} loss={loss:.6f} "
                            f"avg{len(window)}={np.mean(window):.6f} [{modality}]"
                        )

                    if cfg.target_loss is not None and float(np.mean(window)) < cfg.target_loss:
                        stop = "target_loss"
                        break
                    if cfg.max_steps is not None and result.steps >= cfg.max_steps:
                        stop = "max_steps"
                        break

                score = (
                    self.validation_loss(params, val_set, stats) if val_set else float(np.mean(epoch_losses))
                )
                result.val_losses.append((epoch, score))
                if score < result.best_loss:
                    result.best_loss = score
                    result.best_params = params
                    patience = 0
                    if run_path is not None:
                        params.save(run_path / BEST_CHECKPOINT)
                        logger.info(f"📦 epoch {epoch} 最优 {score:.6f}，已写入 {BEST_CHECKPOINT}")
                else:
                    patience += 1

                if stop is None and patience >= cfg.early_stop_patience:
                    stop = "early_stop"
                if stop is not None:
                    result.stop_reason = stop
                    break
        finally:
            if pool is not None:
                pool.shutdown()

        result.params = params
        if run_path is not None:
            params.save(run_path / LAST_CHECKPOINT)
            write_loss_csv(result.records, run_path / LOSS_CSV)
            write_val_csv(result.val_losses, run_path / VAL_LOSS_CSV)
        logger.info(
            f"✅ 训练结束: {result.steps} 步, 原因={result.stop_reason}, 最优={result.best_loss:.6f}"
        )
        return result


def write_loss_csv(records: Sequence[LossRecord], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "loss", "modality"])
        for r in records:
            writer.writerow([r.step, f"{r.loss:.8g}", r.modality])
    return path


def write_val_csv(val_losses: Sequence[Tuple[int, float]], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["epoch", "loss"])
        for epoch, loss in val_losses:
            writer.writerow([epoch, f"{loss:.8g}"])
    return path


def train(
    examples: Sequence[TrainingExample],
    config: RunConfig,
    builder: ConditionBuilder,
    codec: PatternCodec,
    stats: Optional[NormStats] = None,
    run_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
) -> TrainResult:
    return Trainer(config, builder, codec, threads=threads).train(examples, stats=stats, run_dir=run_dir)


__all__ = [
    "MODALITY_CYCLE",
    "LossRecord",
    "TrainResult",
    "Trainer",
    "modality_for_batch",
    "train",
    "write_loss_csv",
    "write_val_csv",
]
