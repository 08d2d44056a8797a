#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
配置、日志、异常与依赖注入
"""
