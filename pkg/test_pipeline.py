#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试命令流水线

验证：
1. 验证 → 计算 → 导出 三个阶段依次完成
2. 失败时报告失败阶段
3. 同一配置重复运行输出逐字节相同
"""

import asyncio

from models.report_models import RunConfig
from services.pipeline import create_pipeline
from services.pipeline.stages import ComputeStage, ValidationStage

INDICES = {"m": "1", "n": "1", "p": "2", "q": "4", "alpha": "1/4", "beta": "1/4"}


def _execute(config: RunConfig, **kwargs):
    return asyncio.run(create_pipeline(**kwargs).execute(config))


def test_default_stage_order():
    assert create_pipeline().get_stage_names() == ["输入验证", "数值计算", "结果导出"]


def test_classify_runs_all_stages():
    result = _execute(RunConfig(command="classify", indices=INDICES))
    assert result["success"]
    assert result["stats"]["completed_stages"] == ["输入验证", "数值计算", "结果导出"]
    assert result["report"].result["regime"] == "Balanced"
    assert result["rendered"].endswith("\n")
    assert set(result["stats"]["stage_times"]) == {"输入验证", "数值计算", "结果导出"}


def test_rendering_is_deterministic():
    config = RunConfig(command="power-check", indices=INDICES, gamma="0", delta="0")
    first = _execute(config)["rendered"]
    second = _execute(config)["rendered"]
    assert first == second


def test_unknown_command_fails_validation():
    result = _execute(RunConfig(command="nope"))
    assert not result["success"]
    assert result["failed_at_stage"] == "输入验证"


def test_missing_file_fails_validation(tmp_path):
    config = RunConfig(command="characteristic", indices=INDICES,
                       files={"sigma": str(tmp_path / "missing.json")})
    result = _execute(config)
    assert result["failed_at_stage"] == "输入验证"
    assert "missing.json" in result["error"]


def test_compute_failure_reports_stage():
    # power-check 缺少 gamma/delta
    result = _execute(RunConfig(command="power-check", indices=INDICES))
    assert not result["success"]
    assert result["failed_at_stage"] == "数值计算"


def test_custom_stages_without_export():
    result = _execute(RunConfig(command="classify", indices=INDICES),
                      custom_stages=[ValidationStage, ComputeStage])
    assert result["success"]
    assert result["rendered"] is None
    assert result["report"].command == "classify"
