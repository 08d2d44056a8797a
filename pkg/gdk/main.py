#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
gdk 命令行主程序入口
"""

import sys

from dotenv import load_dotenv


def main() -> int:
    # 加载环境变量（须在读取 settings 之前）
    load_dotenv()

    from gdk.cli.router import run
    from gdk.core.logger import setup_logging

    # 初始化日志系统
    setup_logging()
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
