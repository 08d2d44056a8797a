#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.diffusion.scheduler

DDPM 调度器：线性 β、前向加噪与间隔时间步的反向一步。

推理时间步取 ``round(T - i·T/n) - 1``（i = 0..n-1），n = 50、T = 1000 时为
999, 979, …, 19。反向一步用子序列上的有效 ᾱ 对 (ᾱ_t, ᾱ_prev) 重新计算后验。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from gdk.core.exceptions import NumericalException

X0_CLIP = 1.2


class SchedulerConfig(BaseModel):
    """运行配置中的调度器段落"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    T: int = Field(1000, ge=1, description="总扩散步数")
    beta_start: float = Field(1e-4, gt=0, lt=1)
    beta_end: float = Field(2e-2, gt=0, lt=1)
    inference_steps: int = Field(50, ge=1, description="推理去噪步数")

    @model_validator(mode="after")
    def _steps_within_t(self) -> "SchedulerConfig":
        if self.inference_steps > self.T:
            raise ValueError("inference_steps 不能超过 T")
        return self


def spaced_timesteps(T: int, n_steps: int) -> np.ndarray:
    """均匀间隔、严格递减的推理时间步"""
    if not 1 <= n_steps <= T:
        raise NumericalException(f"推理步数 {n_steps} 超出范围 [1, {T}]", component="scheduler")
    steps = np.round(T - np.arange(n_steps) * (T / n_steps)).astype(np.int64) - 1
    return steps


@dataclass(frozen=True)
class DDPMScheduler:
    """预计算的 β / α / ᾱ 表"""

    T: int
    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray
    inference_timesteps: np.ndarray

    @classmethod
    def from_config(cls, config: SchedulerConfig, n_steps: Optional[int] = None) -> "DDPMScheduler":
        betas = np.linspace(config.beta_start, config.beta_end, config.T, dtype=np.float64)
        alphas = 1.0 - betas
        return cls(
            T=config.T,
            betas=betas,
            alphas=alphas,
            alpha_bars=np.cumprod(alphas),
            inference_timesteps=spaced_timesteps(config.T, n_steps or config.inference_steps),
        )

    def with_steps(self, n_steps: int) -> "DDPMScheduler":
        """同一张表，换一组推理时间步"""
        return DDPMScheduler(
            T=self.T,
            betas=self.betas,
            alphas=self.alphas,
            alpha_bars=self.alpha_bars,
            inference_timesteps=spaced_timesteps(self.T, n_steps),
        )

    def _check_t(self, t: int) -> None:
        if not 0 <= t < self.T:
            raise NumericalException(f"时间步 {t} 超出范围 [0, {self.T})", component="scheduler")

    def _check_transition(self, t: int, t_prev: int) -> None:
        """(t, t_prev) 必须是推理时间步上相邻的两项；最后一项之后为 -1"""
        steps = [int(s) for s in self.inference_timesteps]
        if t not in steps:
            raise NumericalException(
                f"时间步 {t} 不在推理时间步上", component="scheduler", details={"n_steps": len(steps)}
            )
        i = steps.index(t)
        expected = steps[i + 1] if i + 1 < len(steps) else -1
        if t_prev != expected:
            raise NumericalException(
                f"t={t} 的下一步应为 {expected}，得到 t_prev={t_prev}",
                component="scheduler",
                details={"t": t, "t_prev": t_prev},
            )

    def add_noise(self, x0: np.ndarray, eps: np.ndarray, t: int) -> np.ndarray:
        """√ᾱ_t·x0 + √(1−ᾱ_t)·ε"""
        self._check_t(t)
        if x0.shape != eps.shape:
            raise NumericalException(f"形状不一致: {x0.shape} vs {eps.shape}", component="scheduler")
        abar = self.alpha_bars[t]
        return np.sqrt(abar) * x0 + np.sqrt(1.0 - abar) * eps

    def predict_x0(self, model_eps: np.ndarray, t: int, x_t: np.ndarray) -> np.ndarray:
        abar = self.alpha_bars[t]
        x0 = (x_t - np.sqrt(1.0 - abar) * model_eps) / np.sqrt(abar)
        return np.clip(x0, -X0_CLIP, X0_CLIP)

    def step(
        self,
        model_eps: np.ndarray,
        t: int,
        t_prev: int,
        x_t: np.ndarray,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """反向一步 x_t → x_{t_prev}；t_prev = -1 时直接返回裁剪后的 x0 估计。

        (t, t_prev) 取自 inference_timesteps 的相邻两项，否则抛出 NumericalException。

        rng 为 None 时不加后验噪声（确定性反演）。
        """
        self._check_t(t)
        if not (np.all(np.isfinite(model_eps)) and np.all(np.isfinite(x_t))):
            raise NumericalException("反向步输入包含非有限值", component="scheduler")

        self._check_transition(t, t_prev)

        x0_hat = self.predict_x0(model_eps, t, x_t)
        if t_prev < 0:
            return x0_hat

        abar_t = self.alpha_bars[t]
        abar_prev = self.alpha_bars[t_prev]
        beta_eff = 1.0 - abar_t / abar_prev
        alpha_eff = 1.0 - beta_eff

        coef_x0 = np.sqrt(abar_prev) * beta_eff / (1.0 - abar_t)
        coef_xt = np.sqrt(alpha_eff) * (1.0 - abar_prev) / (1.0 - abar_t)
        mean = coef_x0 * x0_hat + coef_xt * x_t
        if rng is None:
            return mean

        variance = beta_eff * (1.0 - abar_prev) / (1.0 - abar_t)
        return mean + np.sqrt(variance) * rng.standard_normal(x_t.shape)


__all__ = ["SchedulerConfig", "DDPMScheduler", "spaced_timesteps", "X0_CLIP"]
