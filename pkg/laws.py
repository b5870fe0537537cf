#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
指数定律模块

对指数层面的每一条判定给出精确的判定过程，返回带见证的 Verdict：
- classify: 平衡 / 半平衡 / 严格次平衡 / 超临界 / 退化
- one_weight_necessary: 单权情形的平衡对角条件
- power_characteristic_finite: 幂权乘积特征量有限的三线判据
- product_stein_weiss_valid: 乘积 Stein–Weiss 不等式（两条判定路线并交叉核对）
- stein_weiss_1param_valid: 单参数 Stein–Weiss 条件
- half_balanced_sufficiency: 半平衡情形的 A_1 × A_1 充分条件

约定：
- 权重记号 w = |·|^{−γ}，v = |·|^{δ}，于是 ω = w^q，σ = v^{−p′}
- 全部输入为有理数时按精确算术判定；否则按容差判定并标注 near_boundary
- 正部恰为 0_+ 时对应的 ≤ 变为 <（strictness_notes 中记录）
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from indices import (
    ProductIndices,
    Scalar,
    as_float,
    conjugate,
    delta_bracket,
    gamma_gap,
    is_exact,
    sign_of,
)
from models.report_models import RegimeReport, Verdict, Witness
from weights import WeightSpec, a1_product_membership

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MARGIN = 1e-6


class RegimeMismatchError(ValueError):
    """指数不处于操作要求的区域"""


class RouteContradictionError(RuntimeError):
    """两条判定路线在非边界处给出不同结论"""


class Regime(str, Enum):
    BALANCED = "Balanced"
    HALF_BALANCED = "HalfBalanced"
    STRICTLY_SUBBALANCED = "StrictlySubbalanced"
    SUPERCRITICAL = "Supercritical"
    DEGENERATE = "Degenerate"


# ============================================================
# 条件累加器
# ============================================================

class _Conditions:
    """
    逐条记录不等式见证

    精确模式下按有理数比较，不等式恰好取等时记入 boundary_ties；
    浮点模式下 |lhs − rhs| ≤ tol 视为相等，|lhs − rhs| ≤ margin 的比较记入 near_boundary。
    """

    _RELATIONS = {
        "<": lambda s: s < 0,
        "<=": lambda s: s <= 0,
        "==": lambda s: s == 0,
        ">": lambda s: s > 0,
        ">=": lambda s: s >= 0,
    }

    def __init__(self, exact: bool, tol: float = DEFAULT_TOLERANCE, margin: float = DEFAULT_MARGIN):
        self.exact = exact
        self.tol = tol
        self.margin = margin
        self.witnesses: List[Witness] = []
        self.strictness_notes: List[str] = []
        self.near_boundary: List[str] = []
        self.boundary_ties: List[str] = []
        self.notes: List[str] = []

    def check(self, name: str, lhs: Scalar, relation: str, rhs: Scalar,
              strict_reason: Optional[str] = None) -> bool:
        strict = strict_reason is not None and relation in ("<=", ">=")
        if strict:
            relation = relation[0]
            self.strictness_notes.append(f"{name}: {strict_reason}")

        diff = lhs - rhs
        s = sign_of(diff, 0.0 if self.exact else self.tol)
        satisfied = self._RELATIONS[relation](s)

        if self.exact:
            # 精确比较没有"附近"，只记录不等式恰好取等
            if relation != "==" and s == 0:
                self.boundary_ties.append(name)
        else:
            gap = abs(as_float(diff))
            if gap <= self.margin and (relation != "==" or gap != 0):
                self.near_boundary.append(name)

        self.witnesses.append(Witness(
            name=name, lhs=as_float(lhs), relation=relation, rhs=as_float(rhs),
            satisfied=satisfied, strict=strict,
        ))
        return satisfied

    def extend(self, prefix: str, verdict: Verdict) -> None:
        """并入另一份判定的见证（例如约化后的单参数条件）"""
        for w in verdict.witnesses:
            self.witnesses.append(w.model_copy(update={"name": f"{prefix}{w.name}"}))
        self.strictness_notes.extend(f"{prefix}{n}" for n in verdict.strictness_notes)
        self.near_boundary.extend(f"{prefix}{n}" for n in verdict.near_boundary)
        self.boundary_ties.extend(f"{prefix}{n}" for n in verdict.boundary_ties)

    def verdict(self) -> Verdict:
        decision = all(w.satisfied for w in self.witnesses)
        if self.near_boundary:
            logger.warning(f"边界附近的比较: {', '.join(self.near_boundary)}")
        if self.boundary_ties:
            logger.debug(f"不等式取等: {', '.join(self.boundary_ties)}")
        return Verdict(
            decision=decision,
            witnesses=self.witnesses,
            strictness_notes=self.strictness_notes,
            near_boundary=self.near_boundary,
            boundary_ties=self.boundary_ties,
            notes=self.notes,
        )


def _exact(*values) -> bool:
    return is_exact(*values)


# ============================================================
# 区域分类
# ============================================================

def classify(idx: ProductIndices, tol: float = DEFAULT_TOLERANCE) -> Regime:
    """
    按 α/m、β/n 与 Γ 的关系分类

    Γ ≤ 0 时返回 DEGENERATE。
    """
    gap = idx.gap
    t = 0.0 if idx.is_exact else tol
    if sign_of(gap, t) <= 0:
        return Regime.DEGENERATE
    a = idx.alpha / idx.m
    b = idx.beta / idx.n
    low = min(a, b)
    s = sign_of(low - gap, t)
    if s < 0:
        return Regime.SUPERCRITICAL
    if s > 0:
        return Regime.STRICTLY_SUBBALANCED
    if sign_of(a - b, t) == 0:
        return Regime.BALANCED
    return Regime.HALF_BALANCED


def regime_report(idx: ProductIndices, tol: float = DEFAULT_TOLERANCE) -> RegimeReport:
    return RegimeReport(
        regime=classify(idx, tol).value,
        alpha_ratio=as_float(idx.alpha / idx.m),
        beta_ratio=as_float(idx.beta / idx.n),
        gap=as_float(idx.gap),
    )


# ============================================================
# 单权与幂权判据
# ============================================================

def one_weight_necessary(idx: ProductIndices, tol: float = DEFAULT_TOLERANCE,
                         margin: float = DEFAULT_MARGIN) -> Verdict:
    """单权乘积不等式的平衡对角条件：p < q 且 α/m = β/n = Γ"""
    cond = _Conditions(idx.is_exact, tol, margin)
    cond.check("p < q", idx.p, "<", idx.q)
    cond.check("alpha/m == gap", idx.alpha / idx.m, "==", idx.gap)
    cond.check("beta/n == gap", idx.beta / idx.n, "==", idx.gap)
    return cond.verdict()


def _three_lines(cond: _Conditions, idx: ProductIndices, gamma: Scalar, delta: Scalar) -> None:
    m, n, p, q = idx.m, idx.n, idx.p, idx.q
    gap = idx.gap
    p_prime = idx.p_prime
    tol = 0.0 if cond.exact else cond.tol

    cond.check("local integrability omega: gamma*q < m+n", gamma * q, "<", m + n)
    cond.check("local integrability sigma: delta*p' < m+n", delta * p_prime, "<", m + n)
    cond.check("formula: gap == (alpha+beta-gamma-delta)/(m+n)",
               gap, "==", (idx.alpha + idx.beta - gamma - delta) / (m + n))

    delta_n, boundary_n = delta_bracket(gamma, delta, n, p, q, tol)
    delta_m, boundary_m = delta_bracket(gamma, delta, m, p, q, tol)
    note_n = "positive part at 0_+ in Delta(n)" if boundary_n else None
    note_m = "positive part at 0_+ in Delta(m)" if boundary_m else None

    cond.check("alpha-line lower", gap + delta_n / m, "<=", idx.alpha / m, note_n)
    cond.check("alpha-line upper", idx.alpha / m, "<=", gap + (gamma + delta) / m - delta_m / m, note_m)
    cond.check("beta-line lower", gap + delta_m / n, "<=", idx.beta / n, note_m)
    cond.check("beta-line upper", idx.beta / n, "<=", gap + (gamma + delta) / n - delta_n / n, note_n)


def power_characteristic_finite(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                                tol: float = DEFAULT_TOLERANCE,
                                margin: float = DEFAULT_MARGIN) -> Verdict:
    """
    幂权 ω = |(x,y)|^{−γq}、σ = |(x,y)|^{−δp′} 的乘积特征量是否有限

    条件：局部可积 γq < m+n、δp′ < m+n；公式 Γ = (α+β−γ−δ)/(m+n)；
    α 线 Γ + Δ(n)/m ≤ α/m ≤ Γ + (γ+δ)/m − Δ(m)/m 及对称的 β 线。
    """
    gamma, delta = _coerce(gamma), _coerce(delta)
    cond = _Conditions(idx.is_exact and _exact(gamma, delta), tol, margin)
    _three_lines(cond, idx, gamma, delta)
    return cond.verdict()


def power_corollary_bounds(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                           tol: float = DEFAULT_TOLERANCE,
                           margin: float = DEFAULT_MARGIN) -> Verdict:
    """特征量有限时必然成立的推论界：α ≤ m、β ≤ n 以及四个 min 界"""
    gamma, delta = _coerce(gamma), _coerce(delta)
    m, n = idx.m, idx.n
    cond = _Conditions(idx.is_exact and _exact(gamma, delta), tol, margin)
    cond.check("alpha <= m", idx.alpha, "<=", m)
    cond.check("beta <= n", idx.beta, "<=", n)
    cond.check("alpha/m <= gamma/m + 1/q'", idx.alpha / m, "<=", gamma / m + 1 / idx.q_prime)
    cond.check("alpha/m <= delta/m + 1/p", idx.alpha / m, "<=", delta / m + 1 / idx.p)
    cond.check("beta/n <= gamma/n + 1/q'", idx.beta / n, "<=", gamma / n + 1 / idx.q_prime)
    cond.check("beta/n <= delta/n + 1/p", idx.beta / n, "<=", delta / n + 1 / idx.p)
    return cond.verdict()


def one_param_characteristic_finite(m: int, p: Scalar, q: Scalar, alpha: Scalar,
                                    gamma: Scalar, delta: Scalar,
                                    tol: float = DEFAULT_TOLERANCE,
                                    margin: float = DEFAULT_MARGIN) -> Verdict:
    """R^m 上幂权 A_{p,q}^{α} 特征量有限：γq < m、δp′ < m、γ+δ ≥ 0 与平衡等式"""
    p, q, alpha, gamma, delta = (_coerce(v) for v in (p, q, alpha, gamma, delta))
    cond = _Conditions(_exact(p, q, alpha, gamma, delta), tol, margin)
    p_prime = conjugate(p)
    cond.check("gamma*q < m", gamma * q, "<", m)
    cond.check("delta*p' < m", delta * p_prime, "<", m)
    cond.check("gamma+delta >= 0", gamma + delta, ">=", 0)
    cond.check("formula: gap == (alpha-gamma-delta)/m", gamma_gap(p, q), "==", (alpha - gamma - delta) / m)
    return cond.verdict()


def stein_weiss_1param_valid(m: int, p: Scalar, q: Scalar, alpha: Scalar,
                             gamma: Scalar, delta: Scalar,
                             tol: float = DEFAULT_TOLERANCE,
                             margin: float = DEFAULT_MARGIN) -> Verdict:
    """
    单参数 Stein–Weiss 不等式 ‖|x|^{−γ} I_α f‖_q ≤ C‖|x|^{δ} f‖_p 成立的充要条件

    0 < α < m，p ≤ q，qγ < m，p′δ < m，γ+δ ≥ 0，1/p − 1/q = (α−γ−δ)/m
    """
    p, q, alpha, gamma, delta = (_coerce(v) for v in (p, q, alpha, gamma, delta))
    cond = _Conditions(_exact(p, q, alpha, gamma, delta), tol, margin)
    cond.check("0 < alpha", 0, "<", alpha)
    cond.check("alpha < m", alpha, "<", m)
    cond.check("p <= q", p, "<=", q)
    cond.check("q*gamma < m", q * gamma, "<", m)
    cond.check("p'*delta < m", conjugate(p) * delta, "<", m)
    cond.check("gamma+delta >= 0", gamma + delta, ">=", 0)
    cond.check("formula: gap == (alpha-gamma-delta)/m", gamma_gap(p, q), "==", (alpha - gamma - delta) / m)
    return cond.verdict()


# ============================================================
# 乘积 Stein–Weiss：两条路线
# ============================================================

def _route_conditions(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                      tol: float, margin: float) -> Verdict:
    """权重方程 + 约束不等式路线"""
    m, n, p, q = idx.m, idx.n, idx.p, idx.q
    alpha, beta = idx.alpha, idx.beta
    gap = idx.gap
    p_prime, q_prime = idx.p_prime, idx.q_prime
    cond = _Conditions(idx.is_exact and _exact(gamma, delta), tol, margin)
    t = 0.0 if cond.exact else tol

    cond.check("p <= q", p, "<=", q)
    cond.check("formula: gap == (alpha+beta-gamma-delta)/(m+n)",
               gap, "==", (alpha + beta - gamma - delta) / (m + n))
    cond.check("gamma+delta >= 0", gamma + delta, ">=", 0)
    cond.check("local integrability omega: gamma*q < m+n", gamma * q, "<", m + n)
    cond.check("local integrability sigma: delta*p' < m+n", delta * p_prime, "<", m + n)
    a = alpha - m * gap
    b = beta - n * gap
    cond.check("alpha - m*gap >= 0", a, ">=", 0)
    cond.check("beta - n*gap >= 0", b, ">=", 0)

    if sign_of(alpha - m, t) == 0:
        # x 变量积掉后约化为 R^n 上的单参数问题
        cond.notes.append("exceptional case alpha = m")
        cond.check("gamma > m/q", gamma, ">", m / q)
        cond.check("delta > m/p'", delta, ">", m / p_prime)
        cond.extend("reduced: ", stein_weiss_1param_valid(
            n, p, q, beta, gamma - m / q, delta - m / p_prime, tol, margin))
    elif sign_of(beta - n, t) == 0:
        cond.notes.append("exceptional case beta = n")
        cond.check("gamma > n/q", gamma, ">", n / q)
        cond.check("delta > n/p'", delta, ">", n / p_prime)
        cond.extend("reduced: ", stein_weiss_1param_valid(
            m, p, q, alpha, gamma - n / q, delta - n / p_prime, tol, margin))
    elif sign_of(gamma, t) >= 0 >= sign_of(delta, t):
        cond.check("beta - n/p < delta", beta - n / p, "<", delta)
        cond.check("alpha - m/p < delta", alpha - m / p, "<", delta)
    elif sign_of(delta, t) >= 0 >= sign_of(gamma, t):
        cond.check("beta - n/q' < gamma", beta - n / q_prime, "<", gamma)
        cond.check("alpha - m/q' < gamma", alpha - m / q_prime, "<", gamma)
    else:
        cond.check("alpha - m*gap > gamma - n/q", a, ">", gamma - n / q)
        cond.check("alpha - m*gap > delta - n/p'", a, ">", delta - n / p_prime)
        cond.check("beta - n*gap > gamma - m/q", b, ">", gamma - m / q)
        cond.check("beta - n*gap > delta - m/p'", b, ">", delta - m / p_prime)
        cond.check("alpha < m", alpha, "<", m)
        cond.check("beta < n", beta, "<", n)
    return cond.verdict()


def _route_characteristic(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                          tol: float, margin: float) -> Verdict:
    """p ≤ q 加特征量有限路线"""
    cond = _Conditions(idx.is_exact and _exact(gamma, delta), tol, margin)
    cond.check("p <= q", idx.p, "<=", idx.q)
    _three_lines(cond, idx, gamma, delta)
    return cond.verdict()


def product_stein_weiss_valid(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                              tol: float = DEFAULT_TOLERANCE,
                              margin: float = DEFAULT_MARGIN) -> Verdict:
    """
    乘积幂权 Stein–Weiss 不等式是否成立

    同时计算约束不等式路线与特征量路线。两者只允许在边界（精确取等、0_+ 或浮点容差带）上分歧，
    此时记录警告并返回约束路线的结论；非边界处的分歧抛出 RouteContradictionError。

    Raises:
        RouteContradictionError: 两条路线在非边界处结论不同
    """
    gamma, delta = _coerce(gamma), _coerce(delta)
    direct = _route_conditions(idx, gamma, delta, tol, margin)
    via_characteristic = _route_characteristic(idx, gamma, delta, tol, margin)

    if direct.decision == via_characteristic.decision:
        return direct

    flagged = any(
        v.near_boundary or v.strictness_notes or v.boundary_ties
        for v in (direct, via_characteristic)
    )
    if not flagged:
        raise RouteContradictionError(
            f"判定路线不一致: indices={idx.to_dict()}, gamma={gamma}, delta={delta}, "
            f"conditions={direct.decision}, characteristic={via_characteristic.decision}"
        )
    logger.warning(
        f"边界处判定路线分歧: conditions={direct.decision}, "
        f"characteristic={via_characteristic.decision}"
    )
    notes = list(direct.notes) + [
        f"boundary disagreement: characteristic route gives {via_characteristic.decision}"
    ]
    return direct.model_copy(update={"notes": notes})


# ============================================================
# 半平衡充分条件与最优指数
# ============================================================

def half_balanced_sufficiency(idx: ProductIndices, v: WeightSpec, w: WeightSpec) -> Verdict:
    """
    半平衡区域：w^q 或 v^{−p′} 属于 A_1 × A_1 时，特征量有限即推出范数不等式

    Returns:
        decision 为 True/False；两者都不可判定或一者不可判定且另一者不成立时为 None

    Raises:
        RegimeMismatchError: 指数不是半平衡的
    """
    regime = classify(idx)
    if regime is not Regime.HALF_BALANCED:
        raise RegimeMismatchError(f"需要半平衡指数，实际为 {regime.value}")

    q = as_float(idx.q)
    p_prime = as_float(idx.p_prime)
    results = {
        "w^q": a1_product_membership(w.power(q), idx.m, idx.n),
        "v^(-p')": a1_product_membership(v.power(-p_prime), idx.m, idx.n),
    }
    members = sum(1 for member, _ in results.values() if member is True)
    undecided = [name for name, (member, _) in results.items() if member is None]

    notes = []
    for name, (member, bound) in results.items():
        state = "undecidable" if member is None else ("member" if member else "not a member")
        suffix = f", A1 constant >= {bound:g}" if bound is not None else ""
        notes.append(f"{name}: {state}{suffix}")

    witness = Witness(
        name="A1xA1 side condition (w^q or v^(-p'))",
        lhs=float(members), relation=">=", rhs=1.0, satisfied=members >= 1,
    )
    decision: Optional[bool] = members >= 1
    if not decision and undecided:
        decision = None
        notes.append("unknown: membership undecidable for " + ", ".join(undecided))
    return Verdict(decision=decision, witnesses=[witness], notes=notes)


def optimal_exponent(p: Scalar, q: Scalar, parameters: int = 1) -> Scalar:
    """
    特征量幂次的最优指数：单参数 1+max{p′/q, q/p′}，两参数 2+2max{p′/q, q/p′}
    """
    if parameters not in (1, 2):
        raise ValueError(f"parameters 必须为 1 或 2: {parameters}")
    p, q = _coerce(p), _coerce(q)
    p_prime = conjugate(p)
    base = 1 + max(p_prime / q, q / p_prime)
    return base * parameters


def _coerce(value: Scalar) -> Scalar:
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def sample_margin(verdict: Verdict, margin: float = 0.0) -> Tuple[bool, List[str]]:
    """
    判定是否远离边界（供批量交叉核对跳过边界样本）

    margin > 0 时，不等式见证两侧之差不超过 margin 的也算作边界样本。
    """
    flags = list(verdict.near_boundary) + list(verdict.strictness_notes) + list(verdict.boundary_ties)
    if margin > 0:
        flags += [w.name for w in verdict.witnesses
                  if w.relation != "==" and abs(w.lhs - w.rhs) <= margin]
    return not flags, flags
