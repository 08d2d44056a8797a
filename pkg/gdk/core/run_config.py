#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
运行配置模块
训练 / 采样 / 梯度检查共用的 JSON 运行定义
"""

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from gdk.core.exceptions import ConfigException
from gdk.services.denoiser.config import DenoiserConfig, PresetName
from gdk.services.diffusion.scheduler import SchedulerConfig
from gdk.services.tokenizer.layout import TokenLayout, get_layout
from gdk.utils.json_utils import dumps_canonical

ModalitySchedule = Literal["round_robin", "image", "text", "both"]
CaptionLevel = Literal["brief", "detailed"]


class RunConfig(BaseModel):
    """一次训练运行的完整定义"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # 模型
    layout: str = Field("dresscode", description="token 布局预设")
    denoiser_preset: PresetName = Field("desk", description="去噪器宽度/深度预设")
    denoiser_overrides: Dict[str, int] = Field(default_factory=dict, description="覆盖预设中的字段")
    scheduler: SchedulerConfig = Field(default_factory=SchedulerConfig)
    cond_dim: int = Field(64, ge=1)
    cond_seed: int = Field(0)

    # 训练
    seed: int = Field(0, description="运行随机种子")
    batch_size: int = Field(8, ge=1)
    epochs: int = Field(1000, ge=1)
    max_steps: Optional[int] = Field(None, ge=1, description="总步数上限")
    target_loss: Optional[float] = Field(None, gt=0, description="50 步滑动平均低于此值即停止")
    early_stop_patience: int = Field(20, ge=1, description="验证损失不再下降的容忍轮数")
    modality_schedule: ModalitySchedule = "round_robin"
    caption_levels: List[CaptionLevel] = Field(default_factory=lambda: ["brief", "detailed"])
    use_splits: bool = Field(True, description="按 90/5/5 划分训练/验证/测试")

    # 优化器
    lr: float = Field(1e-4, gt=0)
    betas: Tuple[float, float] = (0.95, 0.999)
    weight_decay: float = Field(1e-2, ge=0)

    log_every: int = Field(10, ge=1)

    @field_validator("layout")
    @classmethod
    def _layout_exists(cls, value: str) -> str:
        get_layout(value)
        return value

    @field_validator("caption_levels")
    @classmethod
    def _levels_not_empty(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("caption_levels 不能为空")
        return value

    @property
    def token_layout(self) -> TokenLayout:
        return get_layout(self.layout)

    def denoiser_config(self) -> DenoiserConfig:
        base = DenoiserConfig.preset(self.denoiser_preset, self.token_layout, self.cond_dim)
        if not self.denoiser_overrides:
            return base
        try:
            return DenoiserConfig(**{**base.model_dump(), **self.denoiser_overrides})
        except ValidationError as e:
            raise ConfigException("denoiser_overrides 无效", details={"error": str(e)}) from e


def load_run_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigException(f"运行配置不存在: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigException(f"运行配置不是合法 JSON: {path}", details={"error": str(e)}) from e
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigException(f"运行配置无效: {path}", details={"error": str(e)}) from e
    # 触发去噪器配置校验
    config.denoiser_config()
    return config


def save_run_config(config: RunConfig, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_canonical(config.model_dump(mode="json")), encoding="utf-8")
    return path
