#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
业务组件
"""
