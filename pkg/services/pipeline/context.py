#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令运行的上下文与阶段结果

验证阶段写 inputs，计算阶段写 outcome/report，导出阶段写 rendered/export_files。
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from models.report_models import RunConfig, RunReport


class ProcessingStatus(str, Enum):
    """一次命令运行所处的阶段"""
    PENDING = "pending"
    VALIDATING = "validating"
    COMPUTING = "computing"
    EXPORTING = "exporting"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class StageResult:
    """
    单个阶段的结果

    Attributes:
        success: 阶段是否成功
        data: 阶段输出的摘要（写进调试日志）
        error: 失败原因，CLI 原样打印到 stderr
        warnings: 不影响退出码的提示（例如发散、尺度范围过大）
        stats: 并入运行统计的计时与计数
    """
    success: bool
    data: Optional[Dict[str, Any]] = None
    error: Optional[str] = None
    warnings: List[str] = field(default_factory=list)
    stats: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.success


@dataclass
class PipelineContext:
    """
    在 验证 → 计算 → 导出 之间传递的状态

    Attributes:
        task_id: 运行标识（日志前缀）
        config: 本次运行的 RunConfig
        inputs: 解析后的 CommandInputs（指数、γ/δ、测度、网格）
        outcome: CommandOutcome，含结果字典、判定、序列与附带 CSV
        report: 嵌入配置与版本号的 RunReport
        rendered: 未指定 --out 时写到 stdout 的文本
        export_files: {用途: 绝对路径}
        completed_stages: 已成功的阶段名，供依赖检查
    """
    task_id: str
    config: RunConfig

    inputs: Optional[Any] = None
    outcome: Optional[Any] = None
    report: Optional[RunReport] = None

    rendered: Optional[str] = None
    export_files: Dict[str, str] = field(default_factory=dict)

    status: ProcessingStatus = ProcessingStatus.PENDING
    progress: float = 0.0
    error: Optional[str] = None
    completed_stages: List[str] = field(default_factory=list)
    stats: Dict[str, Any] = field(default_factory=dict)

    started_at: float = field(default_factory=time.time)
    completed_at: Optional[float] = None

    def update_progress(self, progress: float, message: str = ""):
        self.progress = progress
        if message:
            self.stats["last_message"] = message

    def set_error(self, error: str):
        self.error = error
        self.status = ProcessingStatus.FAILED

    def finish(self, status: ProcessingStatus) -> float:
        """记录结束状态，返回耗时（秒）"""
        self.status = status
        self.completed_at = time.time()
        if status is ProcessingStatus.COMPLETED:
            self.progress = 1.0
        return self.completed_at - self.started_at
