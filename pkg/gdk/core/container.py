#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
依赖注入容器模块
使用dependency-injector管理编码器、调度器与编解码器的创建
"""

from dependency_injector import containers, providers

from gdk.core.config import settings
from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.sketch_encoder import SketchEncoder
from gdk.services.conditioning.text_encoder import TextEncoder
from gdk.services.diffusion.scheduler import DDPMScheduler
from gdk.services.tokenizer.codec import PatternCodec


class ApplicationContainer(containers.DeclarativeContainer):
    """应用依赖注入容器"""

    # 全局配置
    settings = providers.Object(settings)

    # 文本编码器 - 单例模式（随机表只生成一次）
    text_encoder = providers.Singleton(
        TextEncoder,
        cond_dim=settings.provided.COND_DIM,
        seed=settings.provided.COND_SEED,
    )

    # 草图编码器 - 单例模式
    sketch_encoder = providers.Singleton(
        SketchEncoder,
        cond_dim=settings.provided.COND_DIM,
        seed=settings.provided.COND_SEED,
    )

    # 条件组装器 - 单例模式
    condition_builder = providers.Singleton(
        ConditionBuilder,
        text_encoder=text_encoder,
        sketch_encoder=sketch_encoder,
    )

    # 调度器 - 工厂模式（按运行配置与步数创建）
    scheduler_factory = providers.Factory(DDPMScheduler.from_config)

    # 版型编解码器 - 工厂模式（阈值来自配置）
    pattern_codec_factory = providers.Factory(
        PatternCodec,
        pad_threshold=settings.provided.PAD_THRESHOLD,
        stitch_radius=settings.provided.STITCH_RADIUS,
        control_point_tol=settings.provided.CONTROL_POINT_TOL,
    )


# 全局容器实例
container = ApplicationContainer()


def get_text_encoder() -> TextEncoder:
    """获取文本编码器实例"""
    return container.text_encoder()


def get_sketch_encoder() -> SketchEncoder:
    """获取草图编码器实例"""
    return container.sketch_encoder()


def get_condition_builder() -> ConditionBuilder:
    """获取条件组装器实例"""
    return container.condition_builder()


def get_pattern_codec() -> PatternCodec:
    """获取版型编解码器实例（工厂模式）"""
    return container.pattern_codec_factory()


def get_scheduler(config, n_steps=None) -> DDPMScheduler:
    """按调度配置创建调度器"""
    return container.scheduler_factory(config, n_steps)
