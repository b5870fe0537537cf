#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
阶段2: 数值计算

职责：
- 把 RunConfig 分派给恰好一个库操作
- 把结果包装为嵌入配置与版本号的 RunReport
- 这是核心计算阶段，耗时最长
"""

import time
from typing import Callable, Optional

from models.report_models import RunReport
from utils.config import settings

from ..base import PipelineStage
from ..context import PipelineContext, ProcessingStatus, StageResult


class ComputeStage(PipelineStage):
    """
    数值计算阶段

    领域错误（指数越界、维数不一致、区域不符等）转为失败的 StageResult；
    发散不是错误，由报告中的 diverging 标志表示。
    """
    stage_name = "数值计算"
    progress_range = (0.1, 0.9)
    dependencies = ["输入验证"]

    def __init__(self, config: Optional[dict] = None):
        super().__init__(config)
        self.command_service = None

    async def process(
        self,
        context: PipelineContext,
        progress_callback: Optional[Callable] = None
    ) -> StageResult:
        self.log_start(context)
        context.status = ProcessingStatus.COMPUTING
        self._report_progress(0.0, context, progress_callback, f"执行 {context.config.command}...")

        # 延迟导入服务
        from services.command_service import CommandService

        if self.command_service is None:
            self.command_service = CommandService()

        config = context.config
        start_time = time.time()
        try:
            outcome = await self.command_service.run_command(config, context.inputs)
        except Exception as e:
            error = f"{config.command} 失败: {type(e).__name__}: {e}"
            self.logger.debug(f"[{context.task_id}] {config.command} 异常", exc_info=True)
            return self.fail(context, error)

        compute_time = time.time() - start_time
        context.outcome = outcome
        context.report = RunReport(
            command=config.command,
            version=settings.app_version,
            config=config,
            result=outcome.result,
            decision=outcome.decision,
            diverging=outcome.diverging,
            series=outcome.series,
        )

        warnings = []
        if outcome.diverging:
            warnings.append(f"{config.command}: 数值结果发散")

        self._report_progress(1.0, context, progress_callback, f"计算完成 ({compute_time:.2f}秒)")
        result = StageResult(
            success=True,
            data={"decision": outcome.decision, "diverging": outcome.diverging},
            warnings=warnings,
            stats={"compute_time": compute_time},
        )
        self.log_complete(context, result)
        return result
