#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行入口
"""

from gdk.cli.router import run

__all__ = ["run"]
