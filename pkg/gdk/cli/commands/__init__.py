#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
各命令组
"""
