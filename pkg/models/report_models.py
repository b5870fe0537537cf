#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
报告数据模型

本模块定义所有判定结果与数值实验报告的数据模型。
命令行的每个子命令最终都输出其中一个模型（嵌入 RunReport），
保证输出结构稳定、可序列化、可复现。

约定：
- 发散以 +∞ 表示并以 JSON 常量 Infinity 输出，同时设置 diverging 标志
- 所有特征量数值都是格点上的下界，而非真实上确界
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ReportModel(BaseModel):
    """所有报告模型的基类：允许 inf 以 JSON 常量输出"""
    model_config = ConfigDict(ser_json_inf_nan="constants", use_enum_values=True)


class Witness(ReportModel):
    """
    单个条件的见证记录

    Attributes:
        name: 条件名称，例如 "alpha-line upper"
        lhs / rhs: 不等式两侧的数值
        relation: "<"、"<=" 或 "=="
        satisfied: 条件是否成立
        strict: 是否因 0_+ 约定被加严为严格不等式
    """
    name: str
    lhs: float
    relation: str
    rhs: float
    satisfied: bool
    strict: bool = False


class Verdict(ReportModel):
    """
    判定结果

    decision 为 True 当且仅当所有见证条件成立；为 None 表示不可判定（unknown）。
    """
    decision: Optional[bool] = None
    witnesses: List[Witness] = Field(default_factory=list)
    strictness_notes: List[str] = Field(default_factory=list)
    near_boundary: List[str] = Field(default_factory=list)
    boundary_ties: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    def failed(self) -> List[Witness]:
        """返回不成立的条件"""
        return [w for w in self.witnesses if not w.satisfied]

    def witness(self, name: str) -> Optional[Witness]:
        for w in self.witnesses:
            if w.name == name:
                return w
        return None


class RegimeReport(ReportModel):
    """指数所处的区域（平衡、半平衡、严格次平衡、超临界、退化）"""
    regime: str
    alpha_ratio: float
    beta_ratio: float
    gap: float


class CharacteristicKind(str, Enum):
    """特征量种类"""
    PLAIN = "plain"
    ONE_TAILED = "one_tailed"
    TWO_TAILED = "two_tailed"


class RectangleModel(ReportModel):
    """矩形 I×J 的可序列化形式"""
    center1: List[float]
    center2: List[float]
    s: float
    t: float


class CharacteristicReport(ReportModel):
    """
    特征量格点上确界报告

    Attributes:
        kind: plain / one_tailed / two_tailed
        sup_value: 格点上的最大局部值（真实上确界的下界）
        argmax: 取得最大值的矩形
        growth_trend: 嵌套子格点上确界的对数斜率（每代）
        diverging: growth_trend 超过阈值或出现 +∞
        scale_sups: 第 j 层嵌套子格点（|k_s|+|k_t| ≤ j）的上确界
        shell_cutoff: 尾部特征量使用的壳层数 K
        shell_cutoff_warning: 最后一层壳贡献超过容差
        tail_certificate: 几何尾部余项的估计上界（相对值）
        variant: 单尾特征量取到最大值的一侧（"omega" 或 "sigma"）
    """
    kind: CharacteristicKind
    sup_value: float
    argmax: Optional[RectangleModel] = None
    growth_trend: float = 0.0
    diverging: bool = False
    lattice_size: int = 0
    scale_sups: List[float] = Field(default_factory=list)
    shell_cutoff: Optional[int] = None
    shell_cutoff_warning: bool = False
    tail_certificate: Optional[float] = None
    variant: Optional[str] = None
    lower_bound: bool = True


class ReverseDoublingReport(ReportModel):
    """反向倍增指数估计"""
    epsilon: float
    residual: float
    dimension: int
    factor: Optional[int] = None
    halvings: int
    used_probes: int
    excluded_probes: int


class EquivalenceReport(ReportModel):
    """三种特征量之间的比值 Â/Ā 与 Ā/A"""
    hat_over_bar: float
    bar_over_plain: float
    plain: CharacteristicReport
    one_tailed: CharacteristicReport
    two_tailed: CharacteristicReport
    epsilon_sigma: float
    epsilon_omega: float


class TestingReport(ReportModel):
    """测试条件（T1）检查结果"""
    __test__ = False  # pytest: not a test class

    max_quotient: float
    max_dual_quotient: float
    characteristic: float
    quotients: List[float] = Field(default_factory=list)
    dual_quotients: List[float] = Field(default_factory=list)
    skipped: int = 0
    window: Tuple[float, float]
    epsilon: Optional[float] = None


class MaximalReport(ReportModel):
    """二进极大函数在评估点上的值及弱型商"""
    values: List[float]
    truncated: List[bool]
    weak_quotient: Optional[float] = None
    dyadic_characteristic: Optional[float] = None


class ExponentFit(ReportModel):
    """
    锐指数拟合

    fitted_slope 为 log N_lower 对 log A 的最小二乘斜率；两参数情形为两个因子斜率之和。
    """
    parameters: int
    family: List[float]
    characteristics: List[float]
    lower_bounds: List[float]
    fitted_slope: float
    target: float
    residual: float
    dropped: List[float] = Field(default_factory=list)
    factor_slopes: List[float] = Field(default_factory=list)


class OneTailedPowerReport(ReportModel):
    """Ā ≤ C·A^{1+max{p′/q, q/p′}} 在幂权族上的检查"""
    exponent: float
    constant: float
    samples: List[float]
    plain: List[float]
    one_tailed: List[float]
    ratios: List[float]
    max_ratio: float
    violations: int
    slack: float
    rd_inverse_delta: List[float] = Field(default_factory=list)
    rd_expected_delta: List[float] = Field(default_factory=list)
    rd_relative_error: Optional[float] = None


class SimpleExampleReport(ReportModel):
    """Dirac–格点原子反例的报告"""
    rho: float
    rho_critical: float
    alpha: float
    beta: float
    p: float
    q: float
    atoms: int
    characteristic: CharacteristicReport
    characteristic_bounded: bool
    weak_quotient: float
    weak_lower_bound: float
    maximal_values: List[float]
    seed: int


class HalfExampleReport(ReportModel):
    """半平衡反例的报告"""
    p: float
    q: float
    m: int
    alpha: float
    shells: int
    radii: List[float]
    local_values: List[float]
    plain_bound_ratio: float
    shell_terms: List[float]
    one_tailed_partial_sums: List[float]
    one_tailed_local_values: List[float]
    shell_decay_rate: float
    one_tailed_diverging: bool
    ap_window: Tuple[float, float, float]
    ap_member: bool


class OutputFormat(str, Enum):
    """输出格式"""
    JSON = "json"
    CSV = "csv"


class RunConfig(ReportModel):
    """
    单次命令运行的完整配置

    一次运行只依赖 RunConfig 即可复现；所有数值以规范字符串保存（有理数保留为 a/b）。
    """
    command: str
    subcommand: Optional[str] = None
    indices: Optional[Dict[str, str]] = None
    gamma: Optional[str] = None
    delta: Optional[str] = None
    files: Dict[str, str] = Field(default_factory=dict)
    k_min: int = -12
    k_max: int = 12
    shifts: int = 8
    shell_cutoff: int = 40
    quadrature_cells: int = 256
    seed: int = 0xA1B2
    output_format: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None
    options: Dict[str, Any] = Field(default_factory=dict)


class RunReport(ReportModel):
    """命令输出：结果 + 配置 + 版本"""
    command: str
    version: str
    config: RunConfig
    result: Dict[str, Any]
    decision: Optional[bool] = None
    diverging: Optional[bool] = None
    series: List[Dict[str, Any]] = Field(default_factory=list)
