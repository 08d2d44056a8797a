#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
合成服装语料：模板、草图栅格化、SVG 渲染
"""

from gdk.services.synthgen.corpus import CorpusEntry, generate_corpus, read_corpus, write_corpus
from gdk.services.synthgen.raster import render_sketch
from gdk.services.synthgen.svg import render_svg, save_svg
from gdk.services.synthgen.templates import TEMPLATES, GarmentTemplate, sample_garment

__all__ = [
    "CorpusEntry",
    "generate_corpus",
    "read_corpus",
    "write_corpus",
    "render_sketch",
    "render_svg",
    "save_svg",
    "TEMPLATES",
    "GarmentTemplate",
    "sample_garment",
]
