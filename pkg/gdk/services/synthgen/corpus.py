#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""gdk.services.synthgen.corpus

合成语料的生成与目录读写::

    <out>/manifest.json
    <out>/0000/pattern.json
    <out>/0000/brief.txt
    <out>/0000/detailed.txt
    <out>/0000/sketch.pgm
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
from loguru import logger

from gdk.core.exceptions import ConfigException
from gdk.services.conditioning.pgm import read_pgm, write_pgm
from gdk.services.pattern.model import Pattern, load_pattern, save_pattern
from gdk.services.synthgen.raster import render_sketch
from gdk.services.synthgen.templates import FAMILY_ORDER, MIN_TAG_SEPARATION, min_tag_separation, sample_garment
from gdk.utils.json_utils import dumps_canonical

MANIFEST = "manifest.json"
MAX_RESAMPLE = 20


@dataclass
class CorpusEntry:
    entry_id: str
    family: str
    pattern: Pattern
    brief: str
    detailed: str
    sketch: np.ndarray


def generate_corpus(n: int, seed: int) -> List[CorpusEntry]:
    """按 skirt → top → dress 轮转生成 n 条样本"""
    if n < 1:
        raise ConfigException(f"语料条数必须 ≥ 1: {n}")
    rng = np.random.default_rng(seed)
    entries: List[CorpusEntry] = []
    for i in range(n):
        family = FAMILY_ORDER[i % len(FAMILY_ORDER)]
        entry_id = f"{i:04d}"
        for _ in range(MAX_RESAMPLE):
            sample = sample_garment(family, rng, name=f"{family}_{entry_id}")
            sep = min_tag_separation(sample.pattern)
            if sep is None or sep >= MIN_TAG_SEPARATION:
                break
        else:
            raise ConfigException(f"样本 {entry_id} 多次重采样后缝合标签仍过近")
        entries.append(
            CorpusEntry(
                entry_id=entry_id,
                family=family,
                pattern=sample.pattern,
                brief=sample.brief,
                detailed=sample.detailed,
                sketch=render_sketch(sample.pattern),
            )
        )
    return entries


def write_corpus(entries: List[CorpusEntry], out_dir: Union[str, Path], seed: int) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for entry in entries:
        d = out / entry.entry_id
        save_pattern(entry.pattern, d / "pattern.json")
        (d / "brief.txt").write_text(entry.brief + "\n", encoding="utf-8")
        (d / "detailed.txt").write_text(entry.detailed + "\n", encoding="utf-8")
        write_pgm(entry.sketch, d / "sketch.pgm")
    manifest = {
        "seed": seed,
        "n": len(entries),
        "entries": [{"id": e.entry_id, "family": e.family, "name": e.pattern.name} for e in entries],
    }
    (out / MANIFEST).write_text(dumps_canonical(manifest), encoding="utf-8")
    logger.info(f"📦 语料已写入 {out}（{len(entries)} 条）")
    return out


def read_corpus(corpus_dir: Union[str, Path]) -> List[CorpusEntry]:
    root = Path(corpus_dir)
    manifest_path = root / MANIFEST
    if not manifest_path.is_file():
        raise ConfigException(f"语料目录缺少 {MANIFEST}: {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigException(f"语料清单不是合法 JSON: {e}")
    entries = []
    for item in manifest.get("entries", []):
        d = root / item["id"]
        entries.append(
            CorpusEntry(
                entry_id=item["id"],
                family=item.get("family", ""),
                pattern=load_pattern(d / "pattern.json"),
                brief=(d / "brief.txt").read_text(encoding="utf-8").strip(),
                detailed=(d / "detailed.txt").read_text(encoding="utf-8").strip(),
                sketch=read_pgm(d / "sketch.pgm"),
            )
        )
    return entries


__all__ = ["CorpusEntry", "generate_corpus", "write_corpus", "read_corpus", "MANIFEST"]
