#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""按条件方案批量采样并与 GT 比较"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from gdk.core.exceptions import UsageException
from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.bundle import ConditionBundle
from gdk.services.engine.bundle import RunBundle
from gdk.services.engine.dataset import TrainingExample
from gdk.services.engine.sampler import sample
from gdk.services.metrics.report import EvalReport, evaluate
from gdk.services.pattern.model import Pattern
from gdk.services.tokenizer.codec import PatternCodec

# 方案 → (文本级别, 是否使用草图)
SCHEMES: Dict[str, Tuple[Optional[str], bool]] = {
    "brief": ("brief", False),
    "detailed": ("detailed", False),
    "sketch": (None, True),
    "sketch+brief": ("brief", True),
    "sketch+detailed": ("detailed", True),
}


def scheme_conditions(builder: ConditionBuilder, example: TrainingExample, scheme: str) -> ConditionBundle:
    if scheme not in SCHEMES:
        raise UsageException(f"未知条件方案: {scheme}", details={"choices": list(SCHEMES)})
    level, use_sketch = SCHEMES[scheme]
    return builder.build(
        text=example.caption(level) if level else None,
        sketch=example.sketch if use_sketch else None,
    )


def benchmark(
    bundle: RunBundle,
    examples: Sequence[TrainingExample],
    scheme: str,
    n_steps: int,
    seed: int,
    builder: ConditionBuilder,
    codec: Optional[PatternCodec] = None,
    threads: int = 1,
) -> EvalReport:
    """第 i 条样本使用种子 seed + i；报告标签为 ``scheme@steps``"""
    codec = codec or PatternCodec()
    pairs: List[Tuple[Pattern, Pattern]] = []
    for i, ex in enumerate(examples):
        conditions = scheme_conditions(builder, ex, scheme)
        result = sample(bundle, conditions, n_steps, seed + i, codec=codec, name=f"{ex.entry_id}_pred")
        pairs.append((result.pattern, ex.pattern))
    label = f"{scheme}@{n_steps}"
    report = evaluate(pairs, label=label, threads=threads)
    logger.info(f"✅ {label}: {len(pairs)} 条样本评估完成")
    return report


__all__ = ["SCHEMES", "benchmark", "scheme_conditions"]
