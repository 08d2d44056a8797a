#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行公共部分：命令注册、线程数与种子解析、条件组装器选择
"""

import argparse
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

from gdk.core.config import settings
from gdk.core.container import get_condition_builder
from gdk.core.exceptions import UsageException
from gdk.core.run_config import RunConfig
from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.sketch_encoder import SketchEncoder
from gdk.services.conditioning.text_encoder import TextEncoder

Handler = Callable[[argparse.Namespace], int]
Configure = Callable[[argparse.ArgumentParser], None]


@dataclass
class Command:
    name: str
    help: str
    configure: Configure
    handler: Handler


@dataclass
class CommandGroup:
    """一个命令模块内的命令集合"""

    commands: List[Command] = field(default_factory=list)

    def command(self, name: str, help: str, arguments: Configure) -> Callable[[Handler], Handler]:
        def decorator(fn: Handler) -> Handler:
            self.commands.append(Command(name=name, help=help, configure=arguments, handler=fn))
            return fn

        return decorator


def resolve_threads(flag: Optional[int]) -> int:
    """GDK_THREADS > --threads > CPU 核数；显式给出的 0 或负数是用法错误"""
    if settings.GDK_THREADS is not None:
        value, source = settings.GDK_THREADS, "GDK_THREADS"
    elif flag is not None:
        value, source = flag, "--threads"
    else:
        value, source = os.cpu_count() or 1, "cpu_count"
    if value < 1:
        raise UsageException(f"线程数必须 ≥ 1: {source}={value}")
    return int(value)


def seed_or(args: argparse.Namespace, default: int = 0) -> int:
    return default if args.seed is None else int(args.seed)


def builder_for(run_config: RunConfig) -> ConditionBuilder:
    """与运行配置的条件维度 / 种子一致的组装器；和全局配置相同时复用容器单例"""
    if run_config.cond_dim == settings.COND_DIM and run_config.cond_seed == settings.COND_SEED:
        return get_condition_builder()
    return ConditionBuilder(
        text_encoder=TextEncoder(cond_dim=run_config.cond_dim, seed=run_config.cond_seed),
        sketch_encoder=SketchEncoder(cond_dim=run_config.cond_dim, seed=run_config.cond_seed),
    )


def require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageException(f"{what}不存在: {p}")
    return p


def require_dir(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise UsageException(f"{what}不存在: {p}")
    return p
