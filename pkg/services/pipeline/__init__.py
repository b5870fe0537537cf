#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令流水线：输入验证 → 数值计算 → 结果导出
"""

from .base import PipelineStage
from .context import PipelineContext, ProcessingStatus, StageResult
from .pipeline import CommandPipeline, create_pipeline
from .stages import DEFAULT_STAGES, ComputeStage, ExportStage, ValidationStage

__all__ = [
    "CommandPipeline",
    "ComputeStage",
    "DEFAULT_STAGES",
    "ExportStage",
    "PipelineContext",
    "PipelineStage",
    "ProcessingStatus",
    "StageResult",
    "ValidationStage",
    "create_pipeline",
]
