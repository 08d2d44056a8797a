#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
缝纫版型模型与几何
"""

from gdk.services.pattern.geometry import (
    PlacedEdge,
    PlacementRecovery,
    canonicalize_pattern,
    compute_stitch_tags,
    place_panel,
    place_pattern,
    recover_placement,
    rotation_matrix,
)
from gdk.services.pattern.model import (
    ArcParams,
    Edge2D,
    Panel,
    Pattern,
    Stitch,
    load_pattern,
    save_pattern,
)

__all__ = [
    "PlacedEdge",
    "PlacementRecovery",
    "canonicalize_pattern",
    "compute_stitch_tags",
    "place_panel",
    "place_pattern",
    "recover_placement",
    "rotation_matrix",
    "ArcParams",
    "Edge2D",
    "Panel",
    "Pattern",
    "Stitch",
    "load_pattern",
    "save_pattern",
]
