#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
自定义异常类模块
各组件统一抛出 GDKException 子类，命令行入口据此映射退出码
"""

from typing import Any, Dict, Optional


class GDKException(Exception):
    """组件层基础异常"""

    def __init__(self, message: str, component: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.component = component
        self.details = details or {}
        super().__init__(self.message)


class UsageException(GDKException):
    """命令行用法错误"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="cli", details=details)


class ConfigException(GDKException):
    """配置文件或预设错误"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="config", details=details)


class PatternParseException(GDKException):
    """版型文件无法解析"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="pattern_model", details=details)


class PatternValidationException(GDKException):
    """版型不满足结构约束（开环、悬空缝合引用、重复缝合边）"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="pattern_model", details=details)


class CapacityExceededException(GDKException):
    """版型超出 token 布局容量"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="tokenizer", details=details)


class LayoutMismatchException(GDKException):
    """布局、统计量或网格形状不一致"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="tokenizer", details=details)


class ConditionException(GDKException):
    """条件输入非法（空文本、草图尺寸错误、维度不匹配）"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="conditioning", details=details)


class CheckpointException(GDKException):
    """检查点文件损坏或与配置不匹配"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component="numerics", details=details)


class NumericalException(GDKException):
    """数值失败：非有限值、形状不匹配、训练发散"""

    def __init__(self, message: str, component: str = "numerics", details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, component=component, details=details)


# 退出码转换器
def exception_to_exit_code(exc: BaseException) -> int:
    """将组件异常转换为进程退出码"""

    if isinstance(exc, UsageException):
        return 1
    if isinstance(exc, NumericalException):
        return 3
    if isinstance(exc, GDKException):
        return 2
    return 1
