#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
阶段3: 结果导出

职责：
- 渲染 JSON 报告或 CSV 序列
- 写到 --out 指定的文件；未指定时交给 CLI 写到 stdout
- 写出附加的 CSV（逐矩形局部值、输出网格）
"""

import time
from typing import Callable, Optional

from models.report_models import OutputFormat
from utils.file_utils import grid_to_csv, series_to_csv, write_series_csv, write_text

from ..base import PipelineStage
from ..context import PipelineContext, ProcessingStatus, StageResult


class ExportStage(PipelineStage):
    """
    结果导出阶段

    报告与序列的渲染顺序固定，同一配置重复运行得到逐字节相同的输出
    """
    stage_name = "结果导出"
    progress_range = (0.9, 1.0)
    dependencies = ["数值计算"]

    async def process(
        self,
        context: PipelineContext,
        progress_callback: Optional[Callable] = None
    ) -> StageResult:
        self.log_start(context)
        context.status = ProcessingStatus.EXPORTING
        self._report_progress(0.0, context, progress_callback, "渲染报告...")

        if context.report is None:
            return self.fail(context, "没有可导出的报告")

        config = context.config
        outcome = context.outcome
        start_time = time.time()

        # ========== 步骤1: 渲染主输出 ==========
        if OutputFormat(config.output_format) is OutputFormat.CSV:
            if outcome is not None and outcome.grid is not None:
                text = grid_to_csv(outcome.grid)
            else:
                text = series_to_csv(context.report.series)
        else:
            text = context.report.model_dump_json(indent=2) + "\n"

        # ========== 步骤2: 写出 ==========
        self._report_progress(0.5, context, progress_callback, "写出文件...")
        try:
            path = await write_text(config.out, text)
            if path is None:
                context.rendered = text
            else:
                context.export_files["report"] = path

            if outcome is not None:
                for side_path, rows in outcome.side_series.items():
                    written = await write_series_csv(side_path, rows)
                    context.export_files[f"csv:{side_path}"] = written
                grid_out = config.options.get("grid_out")
                if outcome.grid is not None and grid_out:
                    context.export_files["grid"] = await write_text(grid_out, grid_to_csv(outcome.grid))
        except OSError as e:
            return self.fail(context, f"写出失败: {e}")

        self._report_progress(1.0, context, progress_callback, "导出完成")
        result = StageResult(
            success=True,
            data={"export_files": dict(context.export_files)},
            stats={"export_time": time.time() - start_time},
        )
        self.log_complete(context, result)
        return result
