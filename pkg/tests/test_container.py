#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
核心模块测试：依赖注入容器与日志配置
"""

from unittest.mock import Mock

from loguru import logger

from gdk.core.config import settings
from gdk.core.container import (
    ApplicationContainer,
    container,
    get_condition_builder,
    get_pattern_codec,
    get_scheduler,
    get_sketch_encoder,
    get_text_encoder,
)
from gdk.core.logger import LogConfig, setup_logging
from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.text_encoder import TextEncoder
from gdk.services.diffusion.scheduler import DDPMScheduler, SchedulerConfig
from gdk.services.tokenizer.codec import PatternCodec


class TestDependencyInjection:
    """依赖注入测试类"""

    def test_container_initialization(self):
        assert isinstance(container, ApplicationContainer)
        for name in (
            "text_encoder",
            "sketch_encoder",
            "condition_builder",
            "scheduler_factory",
            "pattern_codec_factory",
        ):
            assert hasattr(container, name)

    def test_singleton_provider(self):
        """编码器为单例，组装器共享同一个编码器"""
        assert get_text_encoder() is get_text_encoder()
        builder = get_condition_builder()
        assert builder is get_condition_builder()
        assert builder.text_encoder is get_text_encoder()
        assert builder.sketch_encoder is get_sketch_encoder()

    def test_factory_provider(self):
        a, b = get_pattern_codec(), get_pattern_codec()
        assert a is not b
        assert isinstance(a, PatternCodec)

    def test_settings_injected(self):
        assert get_text_encoder().cond_dim == settings.COND_DIM
        assert get_pattern_codec().pad_threshold == settings.PAD_THRESHOLD

    def test_provider_override(self):
        """测试提供者覆盖（用于测试）"""
        mock_encoder = Mock(spec=TextEncoder)
        container.text_encoder.override(mock_encoder)
        try:
            assert get_text_encoder() is mock_encoder
        finally:
            container.text_encoder.reset_override()
        assert isinstance(get_text_encoder(), TextEncoder)

    def test_scheduler_factory(self):
        config = SchedulerConfig(inference_steps=10)
        scheduler = get_scheduler(config)
        assert isinstance(scheduler, DDPMScheduler)
        assert len(scheduler.inference_timesteps) == 10
        assert len(get_scheduler(config, 4).inference_timesteps) == 4
        assert get_scheduler(config) is not scheduler

    def test_builder_type(self):
        assert isinstance(get_condition_builder(), ConditionBuilder)


class TestLogging:
    """日志配置"""

    def test_file_sinks(self, tmp_path):
        config = LogConfig(log_dir=str(tmp_path))
        try:
            config.setup_logger(level="DEBUG", enable_file=True)
            logger.error("❌ sink check")
            logger.complete()
        finally:
            setup_logging(level="INFO", enable_file=False)
        assert "sink check" in (tmp_path / "gdk.log").read_text(encoding="utf-8")
        assert "sink check" in (tmp_path / "error.log").read_text(encoding="utf-8")

    def test_console_only_by_default(self, tmp_path):
        LogConfig(log_dir=str(tmp_path / "logs")).setup_logger(enable_file=False)
        assert not (tmp_path / "logs").exists()
