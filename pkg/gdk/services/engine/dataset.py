#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""训练样本与数据集划分"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from gdk.core.exceptions import CapacityExceededException, ConfigException
from gdk.services.pattern.model import Pattern
from gdk.services.synthgen.corpus import CorpusEntry
from gdk.services.tokenizer.layout import TokenLayout


@dataclass(frozen=True)
class TrainingExample:
    """(版型, 文本, 草图) 三元组；文本分简短 / 详细两级"""

    entry_id: str
    pattern: Pattern
    brief: str
    detailed: str
    sketch: np.ndarray

    def caption(self, level: str) -> str:
        return self.detailed if level == "detailed" else self.brief


def examples_from_corpus(entries: Iterable[CorpusEntry]) -> List[TrainingExample]:
    return [
        TrainingExample(
            entry_id=e.entry_id, pattern=e.pattern, brief=e.brief, detailed=e.detailed, sketch=e.sketch
        )
        for e in entries
    ]


def check_capacity(examples: Sequence[TrainingExample], layout: TokenLayout) -> None:
    """数据集中任一版型超出布局容量即报错"""
    for ex in examples:
        n_panels = len(ex.pattern.panels)
        longest = max((len(p.edges) for p in ex.pattern.panels), default=0)
        if n_panels > layout.max_panels or longest > layout.max_edges_per_panel:
            raise CapacityExceededException(
                f"样本 {ex.entry_id} 超出布局容量",
                details={
                    "panels": n_panels,
                    "max_panels": layout.max_panels,
                    "edges": longest,
                    "max_edges": layout.max_edges_per_panel,
                },
            )


def split_dataset(
    n: int, seed: int, fractions: Tuple[float, float, float] = (0.9, 0.05, 0.05)
) -> Tuple[List[int], List[int], List[int]]:
    """按种子打乱后切成 训练 / 验证 / 测试 三段。

    n < 3 时全部用于训练；n ≥ 3 时三段都非空，验证与测试平分训练之外的部分。
    """
    if n < 1:
        raise ConfigException(f"数据集为空: n={n}")
    if len(fractions) != 3 or any(f < 0 for f in fractions) or not np.isclose(sum(fractions), 1.0):
        raise ConfigException(f"划分比例无效: {fractions}")

    order = [int(i) for i in np.random.default_rng(seed).permutation(n)]
    if n < 3:
        return sorted(order), [], []

    n_held = max(2, int(round(n * (fractions[1] + fractions[2]))))
    n_held = min(n_held, n - 1)
    n_val = max(1, n_held // 2)
    n_test = max(1, n_held - n_val)
    n_train = n - n_val - n_test
    train = sorted(order[:n_train])
    val = sorted(order[n_train : n_train + n_val])
    test = sorted(order[n_train + n_val :])
    return train, val, test


__all__ = ["TrainingExample", "examples_from_corpus", "check_capacity", "split_dataset"]
