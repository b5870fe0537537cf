#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
阶段1: 输入验证

职责：
- 验证命令名与子命令
- 解析指数元组和 γ/δ（有理数字面量保持精确）
- 读取权重/测度 JSON 与网格 CSV（格式错误带 路径:行:列）
- 验证格点与壳层参数范围
"""

from pathlib import Path
from typing import Callable, Optional

from indices import IndexDomainError
from utils.file_utils import InputFormatError
from weights import WeightSpecError

from ...command_service import COMMANDS, CommandError, load_inputs
from ..base import PipelineStage
from ..context import PipelineContext, ProcessingStatus, StageResult


class ValidationStage(PipelineStage):
    """
    输入验证阶段

    在任何数值计算之前尽早发现无效输入
    """
    stage_name = "输入验证"
    progress_range = (0.0, 0.1)

    COUNTEREXAMPLES = ("simple", "half")

    async def process(
        self,
        context: PipelineContext,
        progress_callback: Optional[Callable] = None
    ) -> StageResult:
        self.log_start(context)
        context.status = ProcessingStatus.VALIDATING
        self._report_progress(0.0, context, progress_callback, "开始验证输入参数...")

        config = context.config
        warnings = []

        # ========== 步骤1: 命令 ==========
        if config.command not in COMMANDS:
            return self.fail(context, f"未知命令: {config.command}")
        if config.command == "counterexample" and config.subcommand not in self.COUNTEREXAMPLES:
            return self.fail(context, f"counterexample 需要 simple 或 half，实际为 {config.subcommand}")

        # ========== 步骤2: 格点参数 ==========
        self._report_progress(0.3, context, progress_callback, "验证格点参数...")
        if config.k_min > config.k_max:
            return self.fail(context, f"空的尺度范围: k_min={config.k_min} > k_max={config.k_max}")
        if config.shifts < 0:
            return self.fail(context, f"shifts 不能为负: {config.shifts}")
        if config.shell_cutoff < 1:
            return self.fail(context, f"壳层数至少为 1: {config.shell_cutoff}")
        if config.quadrature_cells < 1:
            return self.fail(context, f"求积单元数至少为 1: {config.quadrature_cells}")
        if config.k_max - config.k_min > 64:
            warnings.append(f"尺度范围较大 ({config.k_max - config.k_min + 1} 个尺度)，扫描可能较慢")

        # ========== 步骤3: 指数与文件 ==========
        self._report_progress(0.6, context, progress_callback, "解析指数与输入文件...")
        for role, path in config.files.items():
            if not Path(path).is_file():
                return self.fail(context, f"{path}: 文件不存在 (--{role})")
        try:
            context.inputs = load_inputs(config)
        except (IndexDomainError, InputFormatError, WeightSpecError, CommandError) as e:
            return self.fail(context, str(e))

        self._report_progress(1.0, context, progress_callback, "输入验证完成")
        result = StageResult(
            success=True,
            data={"files": dict(config.files)},
            warnings=warnings,
            stats={"validated_files": len(config.files)},
        )
        self.log_complete(context, result)
        return result
