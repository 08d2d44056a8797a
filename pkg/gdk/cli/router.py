#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行路由模块
各命令组注册到同一个 argparse 解析器，异常统一映射为退出码
"""

import argparse
import sys
from typing import List, Optional, Sequence

from loguru import logger

from gdk import __version__
from gdk.cli.common import Command, CommandGroup
from gdk.core.exceptions import GDKException, UsageException, exception_to_exit_code
from gdk.core.logger import setup_logging


class _Parser(argparse.ArgumentParser):
    """用法错误转为 UsageException，而不是直接退出"""

    def error(self, message: str):
        raise UsageException(message)


def _common_arguments() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="随机种子")
    parent.add_argument("--threads", type=int, default=None, help="线程数（GDK_THREADS 优先）")
    parent.add_argument("--log-level", default=None, help="日志级别")
    return parent


class CommandRouter:
    """命令注册表"""

    def __init__(self):
        self.groups: List[CommandGroup] = []

    def include_group(self, group: CommandGroup) -> None:
        self.groups.append(group)

    @property
    def commands(self) -> List[Command]:
        return [c for g in self.groups for c in g.commands]

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog="gdk", description="sewing-pattern diffusion kit")
        parser.add_argument("--version", action="version", version=f"gdk {__version__}")
        sub = parser.add_subparsers(dest="command", parser_class=_Parser)
        parent = _common_arguments()
        for cmd in self.commands:
            p = sub.add_parser(cmd.name, help=cmd.help, parents=[parent])
            cmd.configure(p)
            p.set_defaults(handler=cmd.handler)
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        argv = list(sys.argv[1:] if argv is None else argv)
        try:
            args = self.build_parser().parse_args(argv)
            if getattr(args, "handler", None) is None:
                raise UsageException("缺少子命令", details={"commands": [c.name for c in self.commands]})
            if args.log_level:
                setup_logging(level=args.log_level.upper())
            return int(args.handler(args) or 0)
        except GDKException as e:
            if e.details:
                logger.debug(f"❌ [{e.component}] {e.message} {e.details}")
            print(f"error: {e.message}", file=sys.stderr)
            return exception_to_exit_code(e)
        except FloatingPointError as e:
            print(f"error: {e}", file=sys.stderr)
            return 3


def _build_router() -> CommandRouter:
    from gdk.cli.commands import dataset, evaluation, generation, tokens, training

    router = CommandRouter()
    router.include_group(dataset.router)
    router.include_group(tokens.router)
    router.include_group(training.router)
    router.include_group(generation.router)
    router.include_group(evaluation.router)
    return router


cli_router = _build_router()


def run(argv: Optional[Sequence[str]] = None) -> int:
    return cli_router.run(argv)
