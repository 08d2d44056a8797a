#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
DDPM 调度器测试
"""

import numpy as np
import pytest

from gdk.core.exceptions import NumericalException
from gdk.services.diffusion.scheduler import DDPMScheduler, SchedulerConfig, spaced_timesteps


@pytest.fixture(scope="module")
def scheduler() -> DDPMScheduler:
    return DDPMScheduler.from_config(SchedulerConfig())


class TestSchedule:
    """β / ᾱ 表"""

    def test_alpha_bar_oracle(self, scheduler):
        """ᾱ_t = ∏(1 − β_s)，β 在 [1e-4, 0.02] 线性"""
        betas = np.linspace(1e-4, 0.02, 1000)
        for t in (0, 1, 10, 500, 999):
            assert scheduler.alpha_bars[t] == pytest.approx(np.prod(1 - betas[: t + 1]), rel=1e-12)

    def test_snr_strictly_decreasing(self, scheduler):
        snr = scheduler.alpha_bars / (1 - scheduler.alpha_bars)
        assert np.all(np.diff(snr) < 0)

    def test_inference_timesteps(self, scheduler):
        """T=1000、50 步：999, 979, …, 19"""
        steps = scheduler.inference_timesteps
        assert steps[0] == 999 and steps[-1] == 19
        assert len(steps) == 50
        assert np.all(np.diff(steps) == -20)

    def test_single_step(self):
        assert spaced_timesteps(1000, 1).tolist() == [999]

    def test_steps_out_of_range(self):
        with pytest.raises(NumericalException):
            spaced_timesteps(1000, 0)

    def test_config_rejects_too_many_steps(self):
        with pytest.raises(ValueError):
            SchedulerConfig(T=10, inference_steps=20)


class TestForward:
    """前向加噪"""

    def test_zero_noise_at_t0(self, scheduler):
        x0 = np.linspace(-1, 1, 26).reshape(2, 13)
        out = scheduler.add_noise(x0, np.zeros_like(x0), 0)
        assert np.allclose(out, np.sqrt(1 - 1e-4) * x0)

    def test_shape_mismatch(self, scheduler):
        with pytest.raises(NumericalException):
            scheduler.add_noise(np.zeros((2, 3)), np.zeros((3, 2)), 5)

    def test_t_out_of_range(self, scheduler):
        with pytest.raises(NumericalException):
            scheduler.add_noise(np.zeros(3), np.zeros(3), 1000)

    @pytest.mark.parametrize("t", [0, 1, 10, 100, 250, 500, 750, 900, 999])
    def test_variance_preserving(self, scheduler, t):
        """单位方差的 x0 加噪后方差仍在 1 ± 3% 内"""
        rng = np.random.default_rng(t)
        x0 = rng.standard_normal(200_000)
        x_t = scheduler.add_noise(x0, rng.standard_normal(x0.shape), t)
        assert abs(x_t.var() - 1.0) < 0.03

    def test_variance_preserving_for_every_t(self, scheduler):
        """全部 1000 个时间步，每步 1e5 个样本"""
        rng = np.random.default_rng(0)
        x0 = rng.standard_normal(100_000)
        eps = rng.standard_normal(100_000)
        variances = np.array([scheduler.add_noise(x0, eps, t).var() for t in range(scheduler.T)])
        assert np.all(np.abs(variances - 1.0) < 0.03)


class TestReverse:
    """反向一步"""

    def test_true_noise_recovers_x0(self, scheduler, rng):
        """用真实 ε 反推 x0"""
        x0 = rng.uniform(-1, 1, size=(20, 13))
        eps = rng.standard_normal(x0.shape)
        for t in (3, 200, 999):
            x_t = scheduler.add_noise(x0, eps, t)
            assert np.allclose(scheduler.predict_x0(eps, t, x_t), x0, atol=1e-8)

    def test_final_step_with_zero_noise(self, scheduler):
        """最后一个推理时间步之后 t_prev = −1：直接返回裁剪后的 x0 估计"""
        x = np.array([0.5, -0.3, 5.0])
        out = scheduler.step(np.zeros(3), 19, -1, x)
        expected = np.clip(x / np.sqrt(scheduler.alpha_bars[19]), -1.2, 1.2)
        assert np.allclose(out, expected)

    def test_deterministic_mean_without_rng(self, scheduler, rng):
        x0 = rng.uniform(-1, 1, size=(4, 13))
        eps = rng.standard_normal(x0.shape)
        x_t = scheduler.add_noise(x0, eps, 979)
        a = scheduler.step(eps, 979, 959, x_t)
        b = scheduler.step(eps, 979, 959, x_t)
        assert np.array_equal(a, b)

    def test_posterior_variance(self, scheduler):
        """ε 与 x_t 为零时输出的方差等于 β̃ = (1 − ᾱ_t/ᾱ_prev)(1 − ᾱ_prev)/(1 − ᾱ_t)"""
        t, t_prev = 519, 499
        abar_t, abar_prev = scheduler.alpha_bars[t], scheduler.alpha_bars[t_prev]
        expected = (1 - abar_t / abar_prev) * (1 - abar_prev) / (1 - abar_t)
        out = scheduler.step(np.zeros(200_000), t, t_prev, np.zeros(200_000), rng=np.random.default_rng(0))
        assert out.var() == pytest.approx(expected, rel=0.02)

    def test_t_prev_must_decrease(self, scheduler):
        with pytest.raises(NumericalException):
            scheduler.step(np.zeros(3), 979, 979, np.zeros(3))

    @pytest.mark.parametrize(
        "t, t_prev",
        [(980, 960), (979, 939), (979, 958), (19, 0), (39, -1), (999, -1)],
    )
    def test_off_grid_transition(self, scheduler, t, t_prev):
        """(t, t_prev) 不是推理时间步上相邻的两项"""
        with pytest.raises(NumericalException):
            scheduler.step(np.zeros(3), t, t_prev, np.zeros(3))

    def test_respaced_grid_transition(self, scheduler):
        """10 步推理网格上 999 → 899 合法，50 步网格上不合法"""
        coarse = scheduler.with_steps(10)
        assert coarse.inference_timesteps[:2].tolist() == [999, 899]
        assert np.all(np.isfinite(coarse.step(np.zeros(3), 999, 899, np.ones(3))))
        with pytest.raises(NumericalException):
            scheduler.step(np.zeros(3), 999, 899, np.ones(3))

    def test_non_finite_input(self, scheduler):
        with pytest.raises(NumericalException):
            scheduler.step(np.array([np.nan]), 10, 5, np.zeros(1))
