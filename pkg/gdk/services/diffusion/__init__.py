#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
扩散调度模块
"""

from gdk.services.diffusion.scheduler import DDPMScheduler, SchedulerConfig, spaced_timesteps

__all__ = ["DDPMScheduler", "SchedulerConfig", "spaced_timesteps"]
