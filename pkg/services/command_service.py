#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令服务模块

把一份 RunConfig 翻译为恰好一个库操作的调用：
1. load_inputs: 解析指数元组、γ/δ 并读取权重/测度/网格文件
2. execute: 按命令分派到 laws / characteristics / operators / experiments
3. run_command: 在线程中执行计算，避免阻塞事件循环

每个命令返回 CommandOutcome：结果字典、判定（False 时 CLI 退出码为 2）、发散标志与 CSV 序列。
发散是结果而不是错误：以 diverging=True 返回。
"""

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from characteristics import (
    RectangleLattice,
    characteristic_scan,
    default_probes,
    lattice_quadrature,
    reverse_doubling_estimate,
    testing_condition_check,
)
from experiments import (
    example_half,
    example_simple,
    one_tailed_vs_plain_power,
    sandwich_decompose,
    sharpness_fit,
)
from indices import ProductIndices, Scalar, parse_real
from laws import (
    power_characteristic_finite,
    power_corollary_bounds,
    product_stein_weiss_valid,
    regime_report,
    stein_weiss_1param_valid,
)
from models.report_models import CharacteristicKind, MaximalReport, RunConfig
from operators import (
    DyadicConfig,
    OperatorDomainError,
    dyadic_characteristic_1param,
    dyadic_fractional_maximal_1d,
    product_dyadic_maximal,
    product_fractional_integral,
    weak_type_quotient,
)
from utils.config import settings
from utils.file_utils import load_measure, read_grid_csv
from weights import Atomic, DiracOrigin, GridFunction, MeasureSpec, QuadratureConfig, Rectangle

logger = logging.getLogger(__name__)


class CommandError(ValueError):
    """命令参数缺失或不合法"""


# 需要读取的文件: 用途 -> 读取函数
FILE_LOADERS: Dict[str, Callable[[str], Any]] = {
    "sigma": load_measure,
    "omega": load_measure,
    "measure": load_measure,
    "source": load_measure,
    "grid": read_grid_csv,
}


@dataclass
class CommandInputs:
    """验证阶段产出的已解析输入"""
    indices: Optional[ProductIndices] = None
    gamma: Optional[Scalar] = None
    delta: Optional[Scalar] = None
    measures: Dict[str, MeasureSpec] = field(default_factory=dict)
    grid: Optional[GridFunction] = None


@dataclass
class CommandOutcome:
    """
    单个命令的执行结果

    Attributes:
        result: 报告正文（可 JSON 序列化）
        decision: 判定型命令的结论
        diverging: 数值发散标志
        series: --format csv 时导出的序列
        grid: apply-op 的输出网格
        side_series: 额外的 CSV 输出 {路径: 行}
    """
    result: Dict[str, Any]
    decision: Optional[bool] = None
    diverging: Optional[bool] = None
    series: List[Dict[str, Any]] = field(default_factory=list)
    grid: Optional[GridFunction] = None
    side_series: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)


# ============================================================
# 输入解析
# ============================================================

def load_inputs(config: RunConfig) -> CommandInputs:
    """
    解析配置中的指数与文件

    Raises:
        IndexDomainError / InputFormatError: 由底层解析函数抛出
    """
    inputs = CommandInputs()
    if config.indices:
        inputs.indices = ProductIndices.from_mapping(config.indices)
    if config.gamma is not None:
        inputs.gamma = parse_real(config.gamma)
    if config.delta is not None:
        inputs.delta = parse_real(config.delta)
    for role, path in config.files.items():
        loader = FILE_LOADERS.get(role)
        if loader is None:
            raise CommandError(f"未知的输入文件用途: {role}")
        value = loader(path)
        if role == "grid":
            inputs.grid = value
        else:
            inputs.measures[role] = value
    return inputs


def _option(config: RunConfig, key: str, default: Any = None) -> Any:
    value = config.options.get(key)
    return default if value is None else value


def _real(config: RunConfig, key: str, default: Any = None) -> Scalar:
    value = _option(config, key, default)
    if value is None:
        raise CommandError(f"缺少参数 --{key.replace('_', '-')}")
    return parse_real(value)


def _require_indices(inputs: CommandInputs) -> ProductIndices:
    if inputs.indices is None:
        raise CommandError("缺少 --indices")
    return inputs.indices


def _require_weights(inputs: CommandInputs) -> tuple:
    if inputs.gamma is None or inputs.delta is None:
        raise CommandError("缺少 gamma/delta")
    return inputs.gamma, inputs.delta


def _require_measure(inputs: CommandInputs, role: str) -> MeasureSpec:
    if role not in inputs.measures:
        raise CommandError(f"缺少 --{role} 文件")
    return inputs.measures[role]


def _lattice(config: RunConfig, idx: ProductIndices) -> RectangleLattice:
    return RectangleLattice(idx.m, idx.n, config.k_min, config.k_max, config.shifts, config.seed)


def _quad(config: RunConfig) -> QuadratureConfig:
    return QuadratureConfig(
        cells=config.quadrature_cells,
        rel_tol=settings.quadrature_rel_tol,
        max_doublings=settings.quadrature_max_doublings,
        gauss_order=settings.gauss_order,
    )


# ============================================================
# 命令实现
# ============================================================

def _classify(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    return CommandOutcome(result=regime_report(_require_indices(inputs)).model_dump())


def _power_check(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    idx = _require_indices(inputs)
    gamma, delta = _require_weights(inputs)
    finite = power_characteristic_finite(idx, gamma, delta)
    bounded = product_stein_weiss_valid(idx, gamma, delta)
    corollary = power_corollary_bounds(idx, gamma, delta)
    return CommandOutcome(
        result={
            "finite": finite.decision,
            "stein_weiss": bounded.decision,
            "characteristic_verdict": finite.model_dump(),
            "stein_weiss_verdict": bounded.model_dump(),
            "corollary_bounds": corollary.model_dump(),
        },
        decision=finite.decision,
    )


def _sw1(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    gamma, delta = _require_weights(inputs)
    m = int(_real(config, "m", 1))
    verdict = stein_weiss_1param_valid(
        m, _real(config, "p"), _real(config, "q"), _real(config, "alpha"), gamma, delta,
        tol=settings.boundary_tolerance, margin=settings.near_boundary_margin,
    )
    return CommandOutcome(result={"valid": verdict.decision, "verdict": verdict.model_dump()},
                          decision=verdict.decision)


def _characteristic(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    idx = _require_indices(inputs)
    sigma = _require_measure(inputs, "sigma")
    omega = _require_measure(inputs, "omega")
    kind = CharacteristicKind(str(_option(config, "kind", "plain")).replace("-", "_"))
    scan, report = characteristic_scan(
        sigma, omega, idx, _lattice(config, idx), K=config.shell_cutoff, kind=kind,
        quad=lattice_quadrature(_option(config, "lattice_cells", settings.lattice_quadrature_cells)),
        threshold=settings.divergence_slope,
        max_workers=int(_option(config, "workers", settings.max_workers)),
    )
    outcome = CommandOutcome(
        result=report.model_dump(),
        diverging=report.diverging,
        series=[{"level": j, "sup": v} for j, v in enumerate(report.scale_sups)],
    )
    csv_path = _option(config, "csv")
    if csv_path:
        outcome.side_series[csv_path] = scan.records()
    return outcome


def _apply_op(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    if inputs.grid is None:
        raise CommandError("缺少 --grid 输入")
    alpha = float(_real(config, "alpha"))
    beta = float(_real(config, "beta"))
    order = _option(config, "order", "xy")
    out = product_fractional_integral(inputs.grid, alpha, beta, order)
    cell = out.h1 * out.h2
    return CommandOutcome(
        result={
            "box": list(out.box),
            "resolution": list(out.resolution),
            "alpha": alpha,
            "beta": beta,
            "order": order,
            "max": float(np.max(out.values)),
            "min": float(np.min(out.values)),
            "integral": float(np.sum(out.values) * cell),
        },
        grid=out,
    )


def _maximal(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    source = _require_measure(inputs, "source")
    if isinstance(source, DiracOrigin):
        source = Atomic(np.zeros((1, int(_option(config, "dim", 2)))), np.ones(1))
    if not isinstance(source, Atomic):
        raise OperatorDomainError("二进极大函数只支持原子测度")
    omega = inputs.measures.get("omega")
    sigma = inputs.measures.get("sigma")
    points = omega.points if isinstance(omega, Atomic) else source.points
    cfg = DyadicConfig(int(_option(config, "dyadic_k_min", settings.dyadic_k_min)),
                       int(_option(config, "dyadic_k_max", settings.dyadic_k_max)))
    alpha = float(_real(config, "alpha"))

    if source.dim == 1:
        values, truncated = dyadic_fractional_maximal_1d(source, alpha, cfg, points)
    else:
        values, truncated = product_dyadic_maximal(
            source, alpha, float(_real(config, "beta")), cfg, cfg, points,
        )

    weak = None
    if isinstance(omega, Atomic) and _option(config, "q") is not None:
        f_norm = float(_real(config, "f_norm", 1))
        weak = weak_type_quotient(values, omega, float(_real(config, "q")), f_norm)
    dyadic = None
    if source.dim == 1 and isinstance(sigma, Atomic) and isinstance(omega, Atomic):
        dyadic = dyadic_characteristic_1param(
            sigma, omega, alpha, float(_real(config, "p")), float(_real(config, "q")), cfg,
        )
    report = MaximalReport(values=values.tolist(), truncated=truncated.tolist(),
                           weak_quotient=weak, dyadic_characteristic=dyadic)
    series = [{"point": pt.tolist(), "value": float(v), "truncated": bool(t)}
              for pt, v, t in zip(points, values, truncated)]
    return CommandOutcome(result=report.model_dump(), series=series)


def _counterexample(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    which = config.subcommand or "simple"
    K = int(_option(config, "K", 64 if which == "simple" else 32))
    if which == "simple":
        report = example_simple(
            float(_real(config, "rho", 1)), float(_real(config, "alpha", "1/2")),
            float(_real(config, "beta", "1/2")), float(_real(config, "p", 2)),
            float(_real(config, "q", 2)), K, seed=config.seed,
        )
        series = [{"atom": k + 1, "maximal": v} for k, v in enumerate(report.maximal_values)]
        return CommandOutcome(result=report.model_dump(), series=series,
                              diverging=report.characteristic.diverging)
    if which == "half":
        report = example_half(_real(config, "p", 2), _real(config, "q", 4),
                              int(_option(config, "m", 1)), K)
        series = [{"radius": r, "local_value": v} for r, v in zip(report.radii, report.local_values)]
        return CommandOutcome(result=report.model_dump(), series=series,
                              diverging=report.one_tailed_diverging)
    raise CommandError(f"未知的反例: {which}")


def _sandwich(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    idx = _require_indices(inputs)
    gamma, delta = _require_weights(inputs)
    decomposition = sandwich_decompose(
        idx, gamma, delta,
        samples=int(_option(config, "samples", settings.sandwich_samples)),
        seed=config.seed, tol=settings.boundary_tolerance,
    )
    return CommandOutcome(result=decomposition.to_dict())


def _sharpness(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    p, q = _real(config, "p", 2), _real(config, "q", 4)
    m = int(_option(config, "m", 1))
    if _option(config, "mode", "fit") == "one-tailed":
        report = one_tailed_vs_plain_power(p, q, m, K=int(_option(config, "shells", 512)))
        series = [
            {"epsilon": e, "plain": a, "one_tailed": b, "ratio": r}
            for e, a, b, r in zip(report.samples, report.plain, report.one_tailed, report.ratios)
        ]
        return CommandOutcome(result=report.model_dump(), series=series)
    fit = sharpness_fit(
        p, q, m, int(_option(config, "parameters", 1)),
        family_size=int(_option(config, "family_size", 8)), start=int(_option(config, "start", 5)),
    )
    series = [{"epsilon": e, "characteristic": a, "lower_bound": n}
              for e, a, n in zip(fit.family, fit.characteristics, fit.lower_bounds)]
    return CommandOutcome(result=fit.model_dump(), series=series)


def _testing_check(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    idx = _require_indices(inputs)
    sigma = _require_measure(inputs, "sigma")
    omega = _require_measure(inputs, "omega")
    rectangles = [Rectangle.centered(1, 1, 2.0 ** k, 2.0 ** l) for k in (-1, 0, 1) for l in (-1, 0, 1)]
    report = testing_condition_check(
        sigma, omega, idx, rectangles,
        lattice=RectangleLattice(1, 1, max(config.k_min, -6), min(config.k_max, 6), 2, config.seed),
        resolution=int(_option(config, "resolution", settings.testing_grid)),
        box_factor=float(_option(config, "box_factor", settings.testing_box_factor)),
        enforce_window=not _option(config, "no_window", False),
        quad=_quad(config),
    )
    series = [{"rectangle": i, "quotient": a, "dual_quotient": b}
              for i, (a, b) in enumerate(zip(report.quotients, report.dual_quotients))]
    return CommandOutcome(result=report.model_dump(), series=series)


def _reverse_doubling(config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
    mu = _require_measure(inputs, "measure")
    m, n = int(_option(config, "m", 1)), int(_option(config, "n", 1))
    factor = _option(config, "factor")
    report = reverse_doubling_estimate(
        mu, default_probes(m, n),
        halvings=int(_option(config, "halvings", settings.rd_halvings)),
        factor=int(factor) if factor is not None else None,
        quad=_quad(config),
    )
    return CommandOutcome(result=report.model_dump())


COMMANDS: Dict[str, Callable[[RunConfig, CommandInputs], CommandOutcome]] = {
    "classify": _classify,
    "power-check": _power_check,
    "sw1": _sw1,
    "characteristic": _characteristic,
    "apply-op": _apply_op,
    "maximal": _maximal,
    "counterexample": _counterexample,
    "sandwich": _sandwich,
    "sharpness": _sharpness,
    "testing-check": _testing_check,
    "reverse-doubling": _reverse_doubling,
}


class CommandService:
    """命令执行服务：流水线的计算阶段通过它调用库操作"""

    def execute(self, config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
        handler = COMMANDS.get(config.command)
        if handler is None:
            raise CommandError(f"未知命令: {config.command}")
        logger.debug(f"执行命令 {config.command} ({config.subcommand or '-'})")
        return handler(config, inputs)

    async def run_command(self, config: RunConfig, inputs: CommandInputs) -> CommandOutcome:
        # 数值计算在线程中执行，事件循环只负责编排与文件写出
        return await asyncio.to_thread(self.execute, config, inputs)
