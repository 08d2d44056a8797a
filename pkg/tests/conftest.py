#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
测试公共夹具
"""

import numpy as np
import pytest

from gdk.services.conditioning.builder import ConditionBuilder
from gdk.services.conditioning.sketch_encoder import SketchEncoder
from gdk.services.conditioning.text_encoder import TextEncoder
from gdk.services.denoiser.config import DenoiserConfig
from gdk.services.pattern.geometry import lift_points
from gdk.services.pattern.model import ArcParams, Edge2D, Panel, Pattern, Stitch
from gdk.services.synthgen.corpus import generate_corpus
from gdk.services.synthgen.raster import edge_polyline
from gdk.services.tokenizer.codec import PatternCodec
from gdk.services.tokenizer.layout import get_layout
from gdk.services.tokenizer.stats import compute_stats


def make_panel(points, name="panel", rotation=(0.0, 0.0, 0.0), translation=(0.0, 0.0, 0.0)) -> Panel:
    return Panel(
        name=name,
        edges=[Edge2D(start=tuple(map(float, p))) for p in points],
        rotation=rotation,
        translation=translation,
    )


UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def clockwise_arc_panel(rotation=(10.0, 20.0, 30.0), translation=(3.0, -4.0, 5.0)) -> Panel:
    """顺时针正方形，第 1 条边为劣弧（r=15，顺时针扫掠，向外凸出）"""
    corners = [(0.0, 0.0), (0.0, 20.0), (20.0, 20.0), (20.0, 0.0)]
    edges = [Edge2D(start=c) for c in corners]
    edges[1] = Edge2D(start=corners[1], arc=ArcParams(radius=15.0, large_arc=False, ccw=False))
    return Panel(name="cw", edges=edges, rotation=rotation, translation=translation)


def edge_curve_3d(panel: Panel, index: int, samples: int = 9) -> np.ndarray:
    """一条边在世界坐标中的折线"""
    end = panel.edges[(index + 1) % len(panel.edges)].start
    return lift_points(edge_polyline(panel.edges[index], end, samples), panel.rotation, panel.translation)


@pytest.fixture
def unit_square() -> Pattern:
    return Pattern(name="square", panels=[make_panel(UNIT_SQUARE, "square")])


@pytest.fixture
def two_rectangles() -> Pattern:
    """前后两片矩形，沿两条侧缝缝合"""
    rect = [(-20, -30), (20, -30), (20, 30), (-20, 30)]
    front = make_panel(rect, "front", translation=(0.0, 0.0, 15.0))
    back = make_panel(rect, "back", rotation=(0.0, 180.0, 0.0), translation=(0.0, 0.0, -15.0))
    return Pattern(
        name="two_rect",
        panels=[front, back],
        stitches=[Stitch(first=(0, 1), second=(1, 3)), Stitch(first=(0, 3), second=(1, 1))],
    )


@pytest.fixture
def three_panels(two_rectangles) -> Pattern:
    tri = make_panel([(0, 0), (10, 0), (0, 10)], "gusset", translation=(30.0, 0.0, 0.0))
    return Pattern(
        name="three",
        panels=[*two_rectangles.panels, tri],
        stitches=list(two_rectangles.stitches),
    )


@pytest.fixture(scope="session")
def desk_layout():
    return get_layout("dresscode")


@pytest.fixture(scope="session")
def corpus():
    return generate_corpus(12, seed=7)


@pytest.fixture(scope="session")
def corpus_stats(corpus, desk_layout):
    return compute_stats([e.pattern for e in corpus], desk_layout)


@pytest.fixture
def codec() -> PatternCodec:
    return PatternCodec()


@pytest.fixture(scope="session")
def builder() -> ConditionBuilder:
    return ConditionBuilder(TextEncoder(cond_dim=16, seed=0), SketchEncoder(cond_dim=16, seed=0))


@pytest.fixture
def tiny_config() -> DenoiserConfig:
    """2 个面片 × 4 条边的极小去噪器，用于梯度检查"""
    return DenoiserConfig(
        embed_dim=8,
        ffn_dim=12,
        n_blocks=1,
        n_heads=2,
        token_width=13,
        max_panels=2,
        max_edges_per_panel=4,
        cond_dim=16,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
