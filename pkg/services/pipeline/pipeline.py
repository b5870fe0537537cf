#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令流水线执行器

一次命令运行 = 验证 → 计算 → 导出。任一阶段失败立即停止，CLI 把失败映射为退出码 1。
"""

import logging
import time
from typing import Any, Callable, Dict, List, Optional, Type

from models.report_models import RunConfig

from .base import PipelineStage
from .context import PipelineContext, ProcessingStatus, StageResult
from .stages import DEFAULT_STAGES

logger = logging.getLogger(__name__)


class CommandPipeline:
    """按顺序执行阶段类列表；阶段实例在每次 execute 时新建，运行之间不共享状态"""

    def __init__(
        self,
        stages: Optional[List[Type[PipelineStage]]] = None,
        config: Optional[Dict] = None
    ):
        self.stage_classes = list(stages or DEFAULT_STAGES)
        self.config = config or {}

    def get_stage_names(self) -> List[str]:
        return [s.stage_name for s in self.stage_classes]

    async def _run_stage(
        self,
        stage: PipelineStage,
        context: PipelineContext,
        progress_callback: Optional[Callable]
    ) -> StageResult:
        missing = stage.missing_dependency(context)
        if missing:
            return StageResult(success=False, error=missing)
        try:
            return await stage.process(context, progress_callback)
        except Exception as e:
            # 阶段内未预期的异常同样终止运行
            logger.error(f"[{context.task_id}] {stage.stage_name} 异常: {e}", exc_info=True)
            return StageResult(success=False, error=f"{type(e).__name__}: {e}")

    async def execute(
        self,
        config: RunConfig,
        task_id: str = "run",
        progress_callback: Optional[Callable] = None
    ) -> Dict[str, Any]:
        """
        执行一次命令

        Returns:
            成功: success, task_id, report (RunReport), rendered, export_files, stats, processing_time
            失败: success, task_id, error, failed_at_stage, stats
        """
        context = PipelineContext(task_id=task_id, config=config)
        stage_times = context.stats.setdefault("stage_times", {})
        logger.info(f"[{task_id}] 命令 {config.command}: {' → '.join(self.get_stage_names())}")

        for stage_class in self.stage_classes:
            stage = stage_class(self.config)
            tic = time.time()
            result = await self._run_stage(stage, context, progress_callback)
            stage_times[stage.stage_name] = time.time() - tic

            if not result.success:
                context.error = result.error
                context.finish(ProcessingStatus.FAILED)
                return {
                    "success": False,
                    "task_id": task_id,
                    "error": result.error,
                    "failed_at_stage": stage.stage_name,
                    "stats": context.stats,
                }

            for warning in result.warnings:
                logger.warning(f"[{task_id}] {stage.stage_name}: {warning}")
            context.stats.update(result.stats)
            context.completed_stages.append(stage.stage_name)

        elapsed = context.finish(ProcessingStatus.COMPLETED)
        context.stats["completed_stages"] = list(context.completed_stages)
        logger.info(f"[{task_id}] 命令 {config.command} 完成, 耗时 {elapsed:.2f} 秒")
        return {
            "success": True,
            "task_id": task_id,
            "report": context.report,
            "rendered": context.rendered,
            "export_files": context.export_files,
            "stats": context.stats,
            "processing_time": elapsed,
        }


def create_pipeline(
    custom_stages: Optional[List[Type[PipelineStage]]] = None,
    config: Optional[Dict] = None
) -> CommandPipeline:
    """
    Example:
        result = asyncio.run(create_pipeline().execute(run_config))
    """
    return CommandPipeline(stages=custom_stages, config=config)


__all__ = [
    "CommandPipeline",
    "create_pipeline",
]
