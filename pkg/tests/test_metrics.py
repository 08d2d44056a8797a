#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
评估指标测试：面片匹配、几何误差、缝合 PRF、报告
"""

import json

import numpy as np
import pytest

from gdk.services.metrics.matching import EDGE_COUNT_PENALTY, exhaustive_match, match_panels
from gdk.services.metrics.report import evaluate, format_table
from gdk.services.metrics.scores import angle_l2, evaluate_pair
from gdk.services.pattern.model import Pattern, Stitch, empty_pattern

from tests.conftest import UNIT_SQUARE, make_panel

TRIANGLE = [(0, 0), (1, 0), (0, 1)]
RECT = [(0, 0), (2, 0), (2, 1), (0, 1)]


def _three_shapes(stitches, order=(0, 1, 2)):
    shapes = [
        make_panel(UNIT_SQUARE, "square", translation=(0.0, 0.0, 0.0)),
        make_panel(TRIANGLE, "triangle", translation=(5.0, 0.0, 0.0)),
        make_panel(RECT, "rect", translation=(0.0, 5.0, 0.0)),
    ]
    new_index = {old: new for new, old in enumerate(order)}
    remapped = [
        Stitch(first=(new_index[a[0]], a[1]), second=(new_index[b[0]], b[1])) for a, b in stitches
    ]
    return Pattern(name="shapes", panels=[shapes[i] for i in order], stitches=remapped)


GT_STITCHES = [((0, 0), (1, 0)), ((0, 1), (2, 0)), ((1, 1), (2, 1)), ((0, 2), (2, 2))]


def _random_pattern(rng, n_panels):
    panels = []
    for i in range(n_panels):
        n = int(rng.integers(3, 7))
        angles = np.sort(rng.uniform(0, 2 * np.pi, n))
        radii = rng.uniform(5, 20, n)
        pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        panels.append(make_panel(pts.tolist(), f"p{i}"))
    return Pattern(name="random", panels=panels)


def _with_random_stitches(rng, pattern):
    refs = [(p, e) for p, panel in enumerate(pattern.panels) for e in range(len(panel.edges))]
    order = rng.permutation(len(refs))
    n_stitches = int(rng.integers(0, len(refs) // 2 + 1))
    stitches = [
        Stitch(first=refs[order[2 * k]], second=refs[order[2 * k + 1]]) for k in range(n_stitches)
    ]
    return Pattern(name=pattern.name, panels=pattern.panels, stitches=stitches)


class TestMatching:
    """面片匹配"""

    def test_self_match_is_identity(self):
        gt = _three_shapes(GT_STITCHES)
        result = match_panels(gt, gt)
        assert result.pairs == [(0, 0), (1, 1), (2, 2)]
        assert result.total_cost == pytest.approx(0.0, abs=1e-9)

    def test_permutation_recovered(self):
        gt = _three_shapes(GT_STITCHES)
        pred = _three_shapes(GT_STITCHES, order=(2, 0, 1))
        assert match_panels(pred, gt).pred_to_gt() == {0: 2, 1: 0, 2: 1}

    @pytest.mark.parametrize("seed", range(50))
    def test_hungarian_equals_exhaustive(self, seed):
        """≤ 5 个面片的随机实例：分配与最小总代价都与穷举一致"""
        rng = np.random.default_rng(seed)
        pred = _random_pattern(rng, int(rng.integers(1, 6)))
        gt = _random_pattern(rng, int(rng.integers(1, 6)))
        hungarian, exhaustive = match_panels(pred, gt), exhaustive_match(pred, gt)
        assert hungarian.pairs == exhaustive.pairs
        assert hungarian.total_cost == pytest.approx(exhaustive.total_cost)

    @pytest.mark.parametrize("seed", range(50))
    def test_metric_suite_equals_exhaustive(self, seed):
        """整套指标：匈牙利匹配与穷举全部分配得到完全相同的数值"""
        rng = np.random.default_rng(seed)
        pred = _with_random_stitches(rng, _random_pattern(rng, int(rng.integers(1, 6))))
        gt = _with_random_stitches(rng, _random_pattern(rng, int(rng.integers(1, 6))))
        assert evaluate_pair(pred, gt) == evaluate_pair(pred, gt, matcher=exhaustive_match)

    def test_equal_cost_tie_is_lexicographic(self):
        """两个全等面片代价相同：两种匹配都取恒等对应，缝合指标不受影响"""
        square = make_panel(UNIT_SQUARE, "left")
        twin = make_panel(UNIT_SQUARE, "right", translation=(5.0, 0.0, 0.0))
        tri = make_panel(TRIANGLE, "tri", translation=(0.0, 5.0, 0.0))
        gt = Pattern(
            name="twins",
            panels=[square, twin, tri],
            stitches=[Stitch(first=(0, 0), second=(2, 0)), Stitch(first=(1, 1), second=(2, 1))],
        )
        assert match_panels(gt, gt).pairs == exhaustive_match(gt, gt).pairs == [(0, 0), (1, 1), (2, 2)]
        for matcher in (match_panels, exhaustive_match):
            assert evaluate_pair(gt, gt, matcher=matcher).stitch_f1 == 1.0

    def test_more_predictions_than_gt_tie(self):
        """预测多出一个全等面片：留下编号最大的那个不匹配"""
        gt = Pattern(name="one", panels=[make_panel(UNIT_SQUARE)])
        pred = Pattern(name="two", panels=[make_panel(UNIT_SQUARE, "a"), make_panel(UNIT_SQUARE, "b")])
        for matcher in (match_panels, exhaustive_match):
            result = matcher(pred, gt)
            assert result.pairs == [(0, 0)] and result.unmatched_pred == [1]

    def test_rectangular_instance(self, rng):
        pred, gt = _random_pattern(rng, 2), _random_pattern(rng, 4)
        result = match_panels(pred, gt)
        assert len(result.pairs) == 2 and len(result.unmatched_gt) == 2
        assert result.total_cost == pytest.approx(exhaustive_match(pred, gt).total_cost)

    def test_edge_count_penalty(self):
        square = Pattern(name="s", panels=[make_panel(UNIT_SQUARE)])
        tri = Pattern(name="t", panels=[make_panel(TRIANGLE)])
        assert match_panels(square, tri).total_cost >= EDGE_COUNT_PENALTY


class TestPanelL2:
    """面片顶点 L2"""

    def test_translation_invariant(self):
        gt = Pattern(name="gt", panels=[make_panel(UNIT_SQUARE)])
        moved = Pattern(name="pred", panels=[make_panel([(x + 5, y + 5) for x, y in UNIT_SQUARE])])
        assert evaluate_pair(moved, gt).panel_l2 == pytest.approx(0.0, abs=1e-9)

    def test_one_vertex_moved(self):
        """顶点 (1, 0) 沿 x 移动 0.3 cm，按每个面片各自平移到顶点质心后再逐顶点比较。

        质心随之移动 0.075：三个未动顶点各偏 0.075，被移动的顶点偏 0.225，合计 0.45
        （不做质心平移时才是 0.3）。
        """
        gt = Pattern(name="gt", panels=[make_panel(UNIT_SQUARE)])
        pred = Pattern(name="pred", panels=[make_panel([(0, 0), (1.3, 0), (1, 1), (0, 1)])])
        assert evaluate_pair(pred, gt).panel_l2 == pytest.approx(0.45, abs=1e-9)

    def test_corpus_self_match(self, corpus):
        for entry in corpus[:6]:
            m = evaluate_pair(entry.pattern, entry.pattern)
            assert m.panel_l2 == pytest.approx(0.0, abs=1e-6)
            assert m.num_panel_acc == 1.0 and m.num_edge_acc == 1.0


class TestCountsAndPlacement:
    """数量准确率与摆放误差"""

    def test_edge_acc_three_of_four(self):
        pentagon = [(0, 0), (2, 0), (3, 1.5), (1, 3), (-1, 1.5)]
        pred = Pattern(name="pred", panels=[make_panel(UNIT_SQUARE, f"p{i}") for i in range(4)])
        gt_panels = [make_panel(UNIT_SQUARE, f"g{i}") for i in range(3)] + [make_panel(pentagon, "g3")]
        m = evaluate_pair(pred, Pattern(name="gt", panels=gt_panels))
        assert m.num_panel_acc == 1.0
        assert m.num_edge_acc == pytest.approx(0.75)

    def test_panel_count_mismatch(self):
        pred = Pattern(name="pred", panels=[make_panel(UNIT_SQUARE)])
        gt = _three_shapes([])
        assert evaluate_pair(pred, gt).num_panel_acc == 0.0

    def test_translation_error(self):
        """平移相差 (0, 3, 4) → 5"""
        gt = Pattern(name="gt", panels=[make_panel(UNIT_SQUARE)])
        pred = Pattern(name="pred", panels=[make_panel(UNIT_SQUARE, translation=(0.0, 3.0, 4.0))])
        m = evaluate_pair(pred, gt)
        assert m.trans_l2 == pytest.approx(5.0)
        assert m.rot_l2 == pytest.approx(0.0, abs=1e-9)

    def test_rotation_wraps_around(self):
        """(0, 0, 350°) 与 (0, 0, 10°) 相差 20°"""
        assert angle_l2((0, 0, 350), (0, 0, 10)) == pytest.approx(np.deg2rad(20.0))
        assert angle_l2((0, 0, 350), (0, 0, 10)) == pytest.approx(0.349, abs=1e-3)


class TestStitchPrf:
    """缝合精确率 / 召回率 / F1"""

    def test_three_of_four_correct(self):
        gt = _three_shapes(GT_STITCHES)
        pred = _three_shapes(GT_STITCHES[:3] + [((0, 3), (2, 3))])
        m = evaluate_pair(pred, gt)
        assert (m.stitch_precision, m.stitch_recall, m.stitch_f1) == pytest.approx((0.75, 0.75, 0.75))

    def test_permutation_invariant(self):
        """打乱预测面片顺序（缝合随之重编号）后所有指标不变"""
        gt = _three_shapes(GT_STITCHES)
        pred = _three_shapes(GT_STITCHES, order=(1, 2, 0))
        m = evaluate_pair(pred, gt)
        assert m.stitch_f1 == 1.0
        assert m.panel_l2 == pytest.approx(0.0, abs=1e-9)
        assert m.trans_l2 == pytest.approx(0.0, abs=1e-9)

    def test_both_empty(self, unit_square):
        m = evaluate_pair(unit_square, unit_square)
        assert (m.stitch_precision, m.stitch_recall, m.stitch_f1) == (1.0, 1.0, 1.0)

    def test_no_prediction(self):
        gt = _three_shapes(GT_STITCHES)
        pred = _three_shapes([])
        m = evaluate_pair(pred, gt)
        assert (m.stitch_precision, m.stitch_recall, m.stitch_f1) == (0.0, 0.0, 0.0)


class TestReport:
    """聚合报告"""

    def test_empty_prediction_has_no_l2(self, unit_square):
        report = evaluate([(empty_pattern(), unit_square)], label="empty")
        assert report.panel_l2 is None and report.rot_l2 is None
        data = json.loads(report.to_json())
        assert data["panel_l2"] is None
        assert data["n_samples"] == 1
        assert "n/a" in report.to_table()

    def test_macro_average(self, unit_square):
        gt = _three_shapes(GT_STITCHES)
        report = evaluate([(gt, gt), (unit_square, gt)])
        assert report.num_panel_acc == pytest.approx(0.5)
        assert report.n_samples == 2

    def test_threads_do_not_change_result(self, corpus):
        pairs = [(a.pattern, b.pattern) for a, b in zip(corpus[:6], corpus[6:12])]
        assert evaluate(pairs, threads=1) == evaluate(pairs, threads=4)

    def test_table_has_one_row_per_report(self, unit_square):
        reports = [evaluate([(unit_square, unit_square)], label=f"run{i}") for i in range(3)]
        lines = format_table(reports).splitlines()
        assert len(lines) == 4
        assert lines[0].split()[:2] == ["Run", "Panel"]
