#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
条件编码测试：文本、草图、PGM 读写
"""

import numpy as np
import pytest

from gdk.core.exceptions import ConditionException
from gdk.services.conditioning.bundle import ConditionBundle
from gdk.services.conditioning.pgm import read_pgm, write_pgm
from gdk.services.conditioning.sketch_encoder import SKETCH_SIZE, SketchEncoder
from gdk.services.conditioning.text_encoder import MAX_TOKENS, TextEncoder, tokenize_caption


class TestTextEncoder:
    """文本编码器"""

    def test_deterministic(self):
        a = TextEncoder(cond_dim=32, seed=3).encode("A-line midi skirt")
        b = TextEncoder(cond_dim=32, seed=3).encode("A-line midi skirt")
        assert np.array_equal(a.pooled, b.pooled)
        assert np.array_equal(a.sequence, b.sequence)

    def test_distinct_captions(self):
        enc = TextEncoder(cond_dim=32)
        assert not np.allclose(enc.encode("short skirt").pooled, enc.encode("long dress").pooled)

    def test_shapes(self):
        """7 个词 → 7 行序列 + 单位长度池化向量"""
        feats = TextEncoder(cond_dim=16).encode("a knee-length skirt with two side seams")
        assert feats.sequence.shape == (7, 16)
        assert feats.rows().shape == (8, 16)
        assert np.linalg.norm(feats.pooled) == pytest.approx(1.0)
        assert feats.width == 16

    def test_tokenizer_keeps_hyphen_and_truncates(self):
        assert tokenize_caption("Knee-Length, it's fine!") == ["knee-length", "it's", "fine"]
        assert len(tokenize_caption("word " * 100)) == MAX_TOKENS

    @pytest.mark.parametrize("text", ["", "   ", "!!!"])
    def test_empty_text(self, text):
        with pytest.raises(ConditionException):
            TextEncoder(cond_dim=8).encode(text)


class TestSketchEncoder:
    """草图编码器"""

    def test_zero_image(self):
        feats = SketchEncoder(cond_dim=16).encode(np.zeros((SKETCH_SIZE, SKETCH_SIZE)))
        assert feats.sequence.shape == (64, 16)
        assert np.all(feats.sequence == 0)
        assert np.all(feats.pooled == 0)

    def test_single_patch_locality(self):
        """只点亮第 (0, 1) 个 8×8 块 → 只有第 1 行特征非零"""
        image = np.zeros((SKETCH_SIZE, SKETCH_SIZE))
        image[2:5, 9:12] = 1.0
        feats = SketchEncoder(cond_dim=16).encode(image)
        nonzero = np.flatnonzero(np.abs(feats.sequence).max(axis=1) > 0)
        assert nonzero.tolist() == [1]

    def test_wrong_size(self):
        with pytest.raises(ConditionException):
            SketchEncoder().encode(np.zeros((32, 32)))

    def test_out_of_range_pixels(self):
        with pytest.raises(ConditionException):
            SketchEncoder().encode(np.full((SKETCH_SIZE, SKETCH_SIZE), 2.0))


class TestConditionBuilder:
    """条件组装"""

    def test_modalities(self, builder):
        sketch = np.zeros((SKETCH_SIZE, SKETCH_SIZE))
        assert builder.build().modality == "none"
        assert builder.build(text="skirt").modality == "text"
        assert builder.build(sketch=sketch).modality == "image"
        assert builder.build(text="skirt", sketch=sketch).modality == "both"

    def test_select_drops_modality(self, builder):
        both = builder.build(text="skirt", sketch=np.zeros((SKETCH_SIZE, SKETCH_SIZE)))
        assert both.select(use_text=False, use_image=True).modality == "image"
        assert ConditionBundle().select(True, True).modality == "none"

    def test_sketch_from_file(self, builder, tmp_path):
        image = np.zeros((SKETCH_SIZE, SKETCH_SIZE))
        image[10:20, 10:20] = 1.0
        path = write_pgm(image, tmp_path / "s.pgm")
        from_file = builder.build(sketch=str(path))
        from_array = builder.build(sketch=image)
        assert np.allclose(from_file.image.sequence, from_array.image.sequence)


class TestPgm:
    """PGM 读写"""

    def test_round_trip(self, tmp_path, rng):
        image = rng.integers(0, 256, size=(SKETCH_SIZE, SKETCH_SIZE)) / 255.0
        loaded = read_pgm(write_pgm(image, tmp_path / "r.pgm"))
        assert loaded.shape == (SKETCH_SIZE, SKETCH_SIZE)
        assert np.allclose(loaded, image)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConditionException):
            read_pgm(tmp_path / "none.pgm")

    def test_not_an_image(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"not a pgm")
        with pytest.raises(ConditionException):
            read_pgm(path)
