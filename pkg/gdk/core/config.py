#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
应用配置模块
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """应用配置类"""

    # 运行配置
    GDK_THREADS: Optional[int] = Field(None, description="线程数，覆盖命令行 --threads")
    CHECKED_MODE: bool = Field(False, description="数值检查模式：出现非有限值立即报错")

    # 解码配置
    PAD_THRESHOLD: float = Field(0.02, description="填充行判定阈值（归一化空间 L∞）")
    STITCH_RADIUS: float = Field(3.0, description="缝合标签配对半径（厘米）")
    CONTROL_POINT_TOL: float = Field(1e-2, description="控制点折叠容差（厘米）")

    # 条件编码配置
    COND_DIM: int = Field(64, description="条件特征维度")
    COND_SEED: int = Field(0, description="条件编码随机表种子")

    # 日志配置
    LOG_LEVEL: str = Field("INFO", description="日志级别")
    LOG_DIR: str = Field("./logs", description="日志目录")
    LOG_FILE_ENABLED: bool = Field(False, description="是否写入轮转日志文件")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


# 创建全局设置实例
settings = Settings()
