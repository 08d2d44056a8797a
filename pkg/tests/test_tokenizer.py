#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
token 化测试：布局、统计量、编解码、二进制网格
"""

from collections import Counter

import numpy as np
import pytest

from gdk.core.exceptions import CapacityExceededException, LayoutMismatchException
from gdk.services.pattern.geometry import canonicalize_pattern
from gdk.services.tokenizer.grid_io import grid_from_bytes, grid_to_bytes, load_grid, save_grid
from gdk.services.tokenizer.layout import get_layout
from gdk.services.tokenizer.stats import NormStats, compute_stats, load_stats, save_stats

from tests.conftest import clockwise_arc_panel, edge_curve_3d, make_panel


def _assert_same_geometry(decoded, original, atol=1e-5):
    expected = canonicalize_pattern(original)
    assert len(decoded.panels) == len(expected.panels)
    for got, want in zip(decoded.panels, expected.panels):
        assert len(got.edges) == len(want.edges)
        assert np.allclose(np.array(got.vertices()), np.array(want.vertices()), atol=atol)
        assert np.allclose(got.translation, want.translation, atol=atol)
        for eg, ew in zip(got.edges, want.edges):
            assert eg.kind == ew.kind
            if ew.control_points:
                assert np.allclose(eg.control_points, ew.control_points, atol=atol)
            if ew.arc is not None:
                assert eg.arc.radius == pytest.approx(ew.arc.radius, abs=atol)
                assert (eg.arc.large_arc, eg.arc.ccw) == (ew.arc.large_arc, ew.arc.ccw)
    assert decoded.stitch_set() == original.stitch_set()


class TestLayout:
    """布局预设测试"""

    def test_token_width(self):
        """K=1 → D=13，K=2 → D=16"""
        assert get_layout("dresscode").token_width == 13
        assert get_layout("garmentcode").token_width == 16

    def test_garmentcode_rows(self):
        """GarmentCodeData 预设：37 × 39 = 1443 行"""
        assert get_layout("garmentcode").seq_len == 1443

    @pytest.mark.parametrize("preset, rows", [("dresscode", 100), ("sewfactory", 168)])
    def test_other_presets(self, preset, rows):
        assert get_layout(preset).seq_len == rows

    def test_unknown_preset(self):
        from gdk.core.exceptions import ConfigException

        with pytest.raises(ConfigException):
            get_layout("nope")


class TestStats:
    """归一化统计量测试"""

    def test_symmetric_range(self, desk_layout):
        """起点 x 只取 {−50, 50} → shift 0，scale 50"""
        from gdk.services.pattern.model import Pattern

        wide = Pattern(name="wide", panels=[make_panel([(-50, -1), (50, -1), (50, 1), (-50, 1)])])
        stats = compute_stats([wide], desk_layout)
        assert stats.shift[0] == 0.0 and stats.scale[0] == 50.0

    def test_rejects_non_positive_scale(self, desk_layout):
        with pytest.raises(ValueError):
            NormStats(layout=desk_layout, shift=[0.0] * 13, scale=[0.0] * 13)

    def test_constant_dimension_floor(self, unit_square, desk_layout):
        """未使用的圆弧槽位全为 0 → scale 取下限 1e-6"""
        stats = compute_stats([unit_square], desk_layout)
        arc = desk_layout.arc_slice
        assert stats.shift[arc.start] == 0.0
        assert stats.scale[arc.start] == pytest.approx(1e-6)

    def test_corpus_values_in_range(self, corpus, corpus_stats, codec, desk_layout):
        """语料中所有编码值位于 [−1, 1]"""
        for entry in corpus:
            grid = codec.encode(entry.pattern, desk_layout, corpus_stats)
            assert np.all(np.abs(grid.values) <= 1 + 1e-9)

    def test_save_load(self, tmp_path, corpus_stats):
        path = save_stats(corpus_stats, tmp_path / "stats.json")
        assert load_stats(path) == corpus_stats


class TestEncode:
    """编码测试"""

    def test_padding_structure(self, unit_square, desk_layout, codec):
        """单面片 4 边正方形：第 0–3 行非零，其余全零"""
        stats = compute_stats([unit_square], desk_layout)
        grid = codec.encode(unit_square, desk_layout, stats)
        assert grid.values.shape == (100, 13)
        assert np.all(np.abs(grid.values[:4]).max(axis=1) > 0)
        assert np.all(grid.values[4:] == 0)
        assert grid.panel_mask.tolist() == [True] + [False] * 9
        assert grid.edge_mask.sum() == 4

    def test_shuffle_permutes_blocks(self, three_panels, desk_layout, codec):
        """两个打乱种子：面片块多重集相同，顺序不同"""
        stats = compute_stats([three_panels], desk_layout)
        n = desk_layout.max_edges_per_panel

        def blocks(grid):
            return [grid.values[i * n : (i + 1) * n].tobytes() for i in range(3)]

        orders = {}
        for seed in range(20):
            grid = codec.encode(three_panels, desk_layout, stats, shuffle_seed=seed)
            orders[tuple(grid.panel_order)] = blocks(grid)
        assert len(orders) > 1
        multisets = {frozenset(Counter(b).items()) for b in orders.values()}
        assert len(multisets) == 1

    def test_capacity(self, desk_layout, codec, unit_square):
        from gdk.services.pattern.model import Pattern

        big = Pattern(
            name="big",
            panels=[make_panel([(0, 0), (1, 0), (1, 1), (0, 1)], f"p{i}") for i in range(11)],
        )
        stats = compute_stats([unit_square], desk_layout)
        with pytest.raises(CapacityExceededException):
            codec.encode(big, desk_layout, stats)

    def test_stats_layout_mismatch(self, unit_square, codec):
        stats = compute_stats([unit_square], get_layout("dresscode"))
        with pytest.raises(LayoutMismatchException):
            codec.encode(unit_square, get_layout("sewfactory"), stats)


class TestDecode:
    """解码测试"""

    def test_all_zero_grid(self, corpus_stats, desk_layout, codec):
        """纯填充 → 0 个面片"""
        decoded = codec.decode(np.zeros((100, 13)), desk_layout, corpus_stats)
        assert decoded.panels == []

    def test_round_trip_corpus(self, corpus, corpus_stats, desk_layout, codec):
        """decode(encode(p)) 与 p 几何一致，缝合集合相同"""
        for entry in corpus:
            grid = codec.encode(entry.pattern, desk_layout, corpus_stats)
            decoded = codec.decode(grid, desk_layout, corpus_stats)
            _assert_same_geometry(decoded, entry.pattern)

    def test_round_trip_with_shuffle(self, corpus, corpus_stats, desk_layout, codec):
        """打乱后解码：按 panel_order 还原即与原版型一致"""
        entry = corpus[2]
        grid = codec.encode(entry.pattern, desk_layout, corpus_stats, shuffle_seed=11)
        decoded = codec.decode(grid, desk_layout, corpus_stats)
        expected = canonicalize_pattern(entry.pattern)
        inverse = {src: block for block, src in enumerate(grid.panel_order)}
        for src, panel in enumerate(expected.panels):
            got = decoded.panels[inverse[src]]
            assert np.allclose(np.array(got.vertices()), np.array(panel.vertices()), atol=1e-5)
        remapped = {
            tuple(sorted(((inverse[a[0]], a[1]), (inverse[b[0]], b[1])))) for a, b in entry.pattern.stitch_set()
        }
        assert decoded.stitch_set() == remapped

    def test_clockwise_arc_round_trip(self, desk_layout, codec):
        """顺时针面片的圆弧解码后在世界坐标中凸向同一侧"""
        from gdk.services.pattern.model import Pattern

        panel = clockwise_arc_panel()
        pattern = Pattern(name="cw", panels=[panel])
        stats = compute_stats([pattern], desk_layout)
        decoded = codec.decode(codec.encode(pattern, desk_layout, stats), desk_layout, stats)
        _assert_same_geometry(decoded, pattern)
        assert np.allclose(edge_curve_3d(decoded.panels[0], 1), edge_curve_3d(panel, 1), atol=1e-4)

    def test_shape_mismatch(self, corpus_stats, desk_layout, codec):
        with pytest.raises(LayoutMismatchException):
            codec.decode(np.zeros((99, 13)), desk_layout, corpus_stats)


class TestGridIO:
    """二进制网格格式测试"""

    def test_save_load(self, tmp_path, corpus, corpus_stats, desk_layout, codec):
        grid = codec.encode(corpus[0].pattern, desk_layout, corpus_stats)
        path = save_grid(grid, tmp_path / "p.tok", 10, 10)
        loaded, m, n = load_grid(path)
        assert (m, n) == (10, 10)
        assert np.allclose(loaded.values, grid.values.astype(np.float32))
        assert np.array_equal(loaded.panel_mask, grid.panel_mask)
        assert np.array_equal(loaded.edge_mask, grid.edge_mask)

    def test_truncated(self, corpus, corpus_stats, desk_layout, codec):
        grid = codec.encode(corpus[0].pattern, desk_layout, corpus_stats)
        data = grid_to_bytes(grid, 10, 10)
        with pytest.raises(LayoutMismatchException):
            grid_from_bytes(data[:-3])

    def test_truncated_inside_values(self, corpus, corpus_stats, desk_layout, codec):
        """数值区被截断：头部声明的尺寸比文件长"""
        grid = codec.encode(corpus[0].pattern, desk_layout, corpus_stats)
        with pytest.raises(LayoutMismatchException):
            grid_from_bytes(grid_to_bytes(grid, 10, 10)[:100])

    def test_bad_magic(self):
        with pytest.raises(LayoutMismatchException):
            grid_from_bytes(b"x" * 64)
