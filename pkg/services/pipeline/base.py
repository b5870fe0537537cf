#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
流水线阶段基类
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Tuple

from .context import PipelineContext, StageResult


class PipelineStage(ABC):
    """
    流水线阶段

    子类给出 stage_name、在全局进度中占的区间 progress_range，以及必须先成功的
    阶段名 dependencies，并实现 process。
    """
    stage_name: str = "base_stage"
    progress_range: Tuple[float, float] = (0.0, 1.0)
    dependencies: List[str] = []

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or {}
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    async def process(
        self,
        context: PipelineContext,
        progress_callback: Optional[Callable] = None
    ) -> StageResult:
        """执行本阶段；领域错误返回失败的 StageResult，不向外抛出"""

    def missing_dependency(self, context: PipelineContext) -> Optional[str]:
        for dep in self.dependencies:
            if dep not in context.completed_stages:
                return f"依赖阶段 {dep} 未执行"
        return None

    def _report_progress(
        self,
        fraction: float,
        context: PipelineContext,
        progress_callback: Optional[Callable],
        message: str = ""
    ):
        """阶段内进度 fraction ∈ [0, 1] 映射到 progress_range"""
        start, end = self.progress_range
        overall = start + (end - start) * fraction
        context.update_progress(overall, message)
        if progress_callback:
            progress_callback(overall, message or self.stage_name)

    def fail(self, context: PipelineContext, error: str) -> StageResult:
        context.set_error(error)
        result = StageResult(success=False, error=error)
        self.log_complete(context, result)
        return result

    def log_start(self, context: PipelineContext):
        self.logger.info(f"[{context.task_id}] {self.stage_name} 开始: {context.config.command}")

    def log_complete(self, context: PipelineContext, result: StageResult):
        if result.success:
            self.logger.info(f"[{context.task_id}] {self.stage_name} 完成")
            if result.data:
                self.logger.debug(f"[{context.task_id}] {self.stage_name} 输出: {result.data}")
        else:
            self.logger.error(f"[{context.task_id}] {self.stage_name} 失败: {result.error}")
