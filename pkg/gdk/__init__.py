#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
缝纫版型扩散生成工具包
"""

__version__ = "0.1.0"
