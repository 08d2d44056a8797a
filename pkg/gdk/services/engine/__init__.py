#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
训练、采样、补全与基准评估
"""

from gdk.services.engine.benchmark import SCHEMES, benchmark
from gdk.services.engine.bundle import RunBundle
from gdk.services.engine.dataset import TrainingExample, examples_from_corpus, split_dataset
from gdk.services.engine.sampler import SampleResult, complete, sample, sample_many
from gdk.services.engine.trainer import Trainer, TrainResult, modality_for_batch, train

__all__ = [
    "SCHEMES",
    "benchmark",
    "RunBundle",
    "TrainingExample",
    "examples_from_corpus",
    "split_dataset",
    "SampleResult",
    "complete",
    "sample",
    "sample_many",
    "Trainer",
    "TrainResult",
    "modality_for_batch",
    "train",
]
