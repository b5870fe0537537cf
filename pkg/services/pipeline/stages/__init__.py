#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令流水线的三个阶段
"""

from .compute import ComputeStage
from .export import ExportStage
from .validation import ValidationStage

# 执行顺序即依赖顺序
DEFAULT_STAGES = [ValidationStage, ComputeStage, ExportStage]

__all__ = ["ComputeStage", "DEFAULT_STAGES", "ExportStage", "ValidationStage"]
