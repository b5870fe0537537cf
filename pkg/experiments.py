#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
实验模块

可重复运行的构造与数值实验：
- sandwich_decompose: 乘积幂权的夹逼分解 w/v ≤ C_Y·Σ W_i/V_i，每个因子对都是单参数 Stein–Weiss 对
- example_simple: Dirac σ 与沿曲线 (2^k, 2^{−ρk}) 排列的原子 ω，特征量与弱型商在 ρ* 处的相变
- example_half: 半平衡幂权例子，普通特征量有界而单尾壳层和线性发散
- sharpness_fit: 边界附近幂权族上范数下界对特征量的对数斜率
- one_tailed_vs_plain_power: 单尾特征量与普通特征量幂次的比较

每个实验都是独立的纯函数，随机性只来自记录在报告中的种子。
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from characteristics import (
    DEFAULT_DIVERGENCE_SLOPE,
    RectangleLattice,
    characteristic_sup,
    characteristic_sup_1param,
    growth_trend,
    local_characteristic_1param,
    reverse_doubling_estimate,
    tailed_characteristic_1param,
)
from indices import ProductIndices, Scalar, conjugate, format_scalar, is_exact, sign_of
from laws import (
    DEFAULT_TOLERANCE,
    RegimeMismatchError,
    optimal_exponent,
    product_stein_weiss_valid,
    stein_weiss_1param_valid,
)
from models.report_models import (
    CharacteristicKind,
    ExponentFit,
    HalfExampleReport,
    OneTailedPowerReport,
    SimpleExampleReport,
    Verdict,
)
from operators import DyadicConfig, OperatorDomainError, product_dyadic_maximal, weak_type_quotient
from weights import (
    Atomic,
    Density,
    DiracOrigin,
    QuadratureConfig,
    RadialPower,
    Rectangle,
    ShiftedPower,
    dilate_mass_table,
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0xA1B2
DEFAULT_SANDWICH_SAMPLES = 10_000
SANDWICH_RELATIVE_SLACK = 1e-9


class FeasibilityContradictionError(RuntimeError):
    """指数条件成立但构造失败（可行区间为空或因子对不合法）"""


# ============================================================
# 夹逼分解
# ============================================================

@dataclass(frozen=True)
class FactorExponents:
    """单参数因子对 (|x|^{−gamma}, |u|^{delta})，x, u ∈ R^dim"""
    dim: int
    gamma: Scalar
    delta: Scalar

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "gamma": format_scalar(self.gamma), "delta": format_scalar(self.delta)}


@dataclass(frozen=True)
class SandwichPair:
    """
    乘积幂权对 W(x,y) = |x|^{−γ₁}|y|^{−γ₂}，V(u,t) = |u|^{δ₁}|t|^{δ₂}

    verdicts 记录两个因子的单参数 Stein–Weiss 判定。
    """
    first: FactorExponents
    second: FactorExponents
    verdicts: Tuple[Verdict, Verdict]

    @property
    def valid(self) -> bool:
        return all(v.decision is True for v in self.verdicts)

    def log_ratio(self, x: np.ndarray, y: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        """log(W(x,y)/V(u,t))，参数是各变量的范数"""
        return -(float(self.first.gamma) * np.log(x) + float(self.second.gamma) * np.log(y)
                 + float(self.first.delta) * np.log(u) + float(self.second.delta) * np.log(t))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "valid": self.valid,
        }


@dataclass(frozen=True)
class SandwichDecomposition:
    """
    夹逼分解结果

    Attributes:
        case: nonnegative（γ, δ ≥ 0）、gamma_negative、delta_negative 或 exceptional
        pairs: 支配权重对；exceptional 时为空
        lambda_used: 线性方程组解族 z_λ 中选取的 λ（仅 nonnegative）
        feasibility_interval: 两个因子 Stein–Weiss 约束给出的开区间（仅 nonnegative）
        young_constant: 逐点不等式中的常数 C_Y
        parameters: 中间量（Γ, a, b, η, ρ, η_i, ρ_i, λ 的非负区间等）
        reduced: α = m 或 β = n 时约化问题的单参数判定
        samples, max_ratio: 逐点抽查的样本数与 w/v 对 C_Y·Σ W_i/V_i 的最大比值
    """
    case: str
    pairs: Tuple[SandwichPair, ...]
    lambda_used: Optional[Scalar]
    feasibility_interval: Optional[Tuple[Scalar, Scalar]]
    young_constant: float
    parameters: Dict[str, Scalar] = field(default_factory=dict)
    reduced: Optional[Verdict] = None
    samples: int = 0
    max_ratio: Optional[float] = None
    seed: int = DEFAULT_SEED

    def to_dict(self) -> Dict[str, Any]:
        interval = None
        if self.feasibility_interval is not None:
            interval = [format_scalar(v) for v in self.feasibility_interval]
        return {
            "case": self.case,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "lambda_used": format_scalar(self.lambda_used) if self.lambda_used is not None else None,
            "feasibility_interval": interval,
            "young_constant": self.young_constant,
            "parameters": {k: format_scalar(v) for k, v in self.parameters.items()},
            "reduced": self.reduced.model_dump(mode="json") if self.reduced is not None else None,
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "seed": self.seed,
        }


def _pair(idx: ProductIndices, first: Tuple[Scalar, Scalar], second: Tuple[Scalar, Scalar],
          tol: float) -> SandwichPair:
    f1 = FactorExponents(idx.m, *first)
    f2 = FactorExponents(idx.n, *second)
    verdicts = (
        stein_weiss_1param_valid(idx.m, idx.p, idx.q, idx.alpha, f1.gamma, f1.delta, tol),
        stein_weiss_1param_valid(idx.n, idx.p, idx.q, idx.beta, f2.gamma, f2.delta, tol),
    )
    pair = SandwichPair(f1, f2, verdicts)
    if not pair.valid:
        failed = [w.name for v in verdicts for w in v.witnesses if not w.satisfied]
        raise FeasibilityContradictionError(f"因子对不满足单参数 Stein–Weiss 条件: {failed}")
    return pair


def _nonnegative_case(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                      tol: float) -> Tuple[SandwichPair, Scalar, Tuple[Scalar, Scalar], Dict[str, Scalar]]:
    """
    γ, δ ≥ 0：z_λ = (Δ₁, Δ₂, Γ₁, Γ₂) = (δ−b−λ, b+λ, γ+λ, −λ)

    λ 取开可行区间与四个分量全非负的闭区间之交的中点；分量非负时
    |(x,y)|^{−γ} ≤ |x|^{−Γ₁}|y|^{−Γ₂}，|(u,t)|^{−δ} ≤ |u|^{−Δ₁}|t|^{−Δ₂}，C_Y = 1。
    """
    m, n = idx.m, idx.n
    q, p_prime = idx.q, idx.p_prime
    b = idx.beta - n * idx.gap

    lo = max(delta - b - m / p_prime, -n / q)
    hi = min(m / q - gamma, n / p_prime - b)
    nonneg_lo = max(-gamma, -b)
    nonneg_hi = min(0 * b, delta - b)
    lam_lo, lam_hi = max(lo, nonneg_lo), min(hi, nonneg_hi)
    if lam_lo > lam_hi:
        raise FeasibilityContradictionError(
            f"λ 的可行集为空: 开区间 ({lo}, {hi})，非负区间 [{nonneg_lo}, {nonneg_hi}]"
        )
    lam = (lam_lo + lam_hi) / 2
    if not (lo < lam < hi):
        raise FeasibilityContradictionError(f"λ = {lam} 不在开可行区间 ({lo}, {hi}) 内")

    first = (gamma + lam, delta - b - lam)
    second = (-lam, b + lam)
    pair = _pair(idx, first, second, tol)
    params = {"lambda_lo": lam_lo, "lambda_hi": lam_hi}
    return pair, lam, (lo, hi), params


def _negative_case(idx: ProductIndices, gamma: Scalar, delta: Scalar, gamma_negative: bool,
                   tol: float) -> Tuple[Tuple[SandwichPair, SandwichPair], Dict[str, Scalar]]:
    """
    γ < 0 或 δ < 0：η 取负指数的相反数，两个支配对各自把 η 全部分给一个因子

    ρ_i = ρ − (α+β) + (m+n)·(β/n 或 α/m) 必须非负，否则负号不能被单个因子吸收。
    """
    m, n = idx.m, idx.n
    alpha, beta = idx.alpha, idx.beta
    a = alpha - m * idx.gap
    b = beta - n * idx.gap
    eta = -gamma if gamma_negative else -delta
    rho = gamma + delta
    params: Dict[str, Scalar] = {
        "eta": eta,
        "rho": rho,
        "eta_1": alpha + eta - m * beta / n,
        "rho_1": rho - (alpha + beta) + (m + n) * beta / n,
        "eta_2": beta + eta - n * alpha / m,
        "rho_2": rho - (alpha + beta) + (m + n) * alpha / m,
    }
    negative = [name for name in ("rho_1", "rho_2") if sign_of(params[name], tol) < 0]
    if negative:
        raise FeasibilityContradictionError(
            f"{', '.join(negative)} 为负: " + ", ".join(f"{k}={params[k]}" for k in negative)
        )
    if gamma_negative:
        # |(x,y)|^η ≤ C_Y(|x|^η + |y|^η)，|(u,t)|^δ ≥ |u|^{a+η}|t|^b 与 |u|^a|t|^{b+η}
        pairs = (
            _pair(idx, (gamma, a + eta), (0 * b, b), tol),
            _pair(idx, (0 * a, a), (gamma, b + eta), tol),
        )
    else:
        pairs = (
            _pair(idx, (a + eta, delta), (b, 0 * b), tol),
            _pair(idx, (a, 0 * a), (b + eta, delta), tol),
        )
    return pairs, params


def young_constant(eta: Scalar) -> float:
    """(s+t)^η ≤ C(s^η + t^η) 的最优常数 max{1, 2^{η−1}}"""
    return max(1.0, 2.0 ** (float(eta) - 1))


def sandwich_spot_check(decomposition: SandwichDecomposition, gamma: Scalar, delta: Scalar,
                        samples: int = DEFAULT_SANDWICH_SAMPLES,
                        seed: int = DEFAULT_SEED) -> float:
    """
    在随机点上检查 |(x,y)|^{−γ}/|(u,t)|^{δ} ≤ C_Y·Σ W_i(x,y)/V_i(u,t)

    四个范数在 [1e-3, 1e3] 上对数均匀独立抽取（任意一组范数都可由某个点实现）。

    Returns:
        左右两边比值的最大值（成立时 ≤ 1）
    """
    if not decomposition.pairs or samples <= 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x, y, u, t = 10.0 ** rng.uniform(-3.0, 3.0, size=(4, samples))
    lhs = -float(gamma) * np.log(np.hypot(x, y)) - float(delta) * np.log(np.hypot(u, t))
    terms = np.stack([pair.log_ratio(x, y, u, t) for pair in decomposition.pairs])
    rhs = math.log(decomposition.young_constant) + special.logsumexp(terms, axis=0)
    return float(np.exp(np.max(lhs - rhs)))


def sandwich_decompose(idx: ProductIndices, gamma: Scalar, delta: Scalar,
                       samples: int = DEFAULT_SANDWICH_SAMPLES, seed: int = DEFAULT_SEED,
                       tol: float = DEFAULT_TOLERANCE) -> SandwichDecomposition:
    """
    把乘积权重对 (|(x,y)|^{−γ}, |(u,t)|^{δ}) 夹在有限个乘积幂权对之和下方

    Raises:
        RegimeMismatchError: 乘积 Stein–Weiss 不等式不成立
        FeasibilityContradictionError: 条件成立但构造或逐点抽查失败
    """
    validity = product_stein_weiss_valid(idx, gamma, delta, tol)
    if validity.decision is not True:
        raise RegimeMismatchError(
            f"乘积 Stein–Weiss 不等式不成立: indices={idx.to_dict()}, gamma={gamma}, delta={delta}"
        )
    t = 0.0 if idx.is_exact and is_exact(gamma, delta) else tol
    m, n = idx.m, idx.n
    base = {
        "gap": idx.gap,
        "a": idx.alpha - m * idx.gap,
        "b": idx.beta - n * idx.gap,
    }

    for exceptional, dim, order, offset in (
        (sign_of(idx.alpha - m, t) == 0, n, idx.beta, m),
        (sign_of(idx.beta - n, t) == 0, m, idx.alpha, n),
    ):
        if exceptional:
            reduced_gamma = gamma - offset / idx.q
            reduced_delta = delta - offset / idx.p_prime
            reduced = stein_weiss_1param_valid(dim, idx.p, idx.q, order, reduced_gamma, reduced_delta, tol)
            logger.info(f"例外情形：积掉一个变量后约化为 R^{dim} 上的单参数问题")
            params = dict(base, reduced_gamma=reduced_gamma, reduced_delta=reduced_delta)
            return SandwichDecomposition(
                case="exceptional", pairs=(), lambda_used=None, feasibility_interval=None,
                young_constant=1.0, parameters=params, reduced=reduced, seed=seed,
            )

    sg, sd = sign_of(gamma, t), sign_of(delta, t)
    if sg >= 0 and sd >= 0:
        pair, lam, interval, extra = _nonnegative_case(idx, gamma, delta, tol)
        decomposition = SandwichDecomposition(
            case="nonnegative", pairs=(pair,), lambda_used=lam, feasibility_interval=interval,
            young_constant=1.0, parameters={**base, **extra}, seed=seed,
        )
    else:
        gamma_negative = sg < 0
        pairs, extra = _negative_case(idx, gamma, delta, gamma_negative, tol)
        decomposition = SandwichDecomposition(
            case="gamma_negative" if gamma_negative else "delta_negative",
            pairs=pairs, lambda_used=None, feasibility_interval=None,
            young_constant=young_constant(extra["eta"]), parameters={**base, **extra}, seed=seed,
        )

    ratio = sandwich_spot_check(decomposition, gamma, delta, samples, seed)
    if ratio > 1 + SANDWICH_RELATIVE_SLACK:
        raise FeasibilityContradictionError(f"逐点夹逼不等式不成立: 最大比值 {ratio:.6g}")
    logger.debug(f"夹逼分解 {decomposition.case}: {len(decomposition.pairs)} 对，抽查最大比值 {ratio:.6g}")
    return replace(decomposition, samples=samples, max_ratio=ratio)


# ============================================================
# 反例：Dirac σ 与曲线上的原子
# ============================================================

def example_simple(rho: float, alpha: float, beta: float, p: float, q: float, K: int = 64,
                   seed: int = DEFAULT_SEED) -> SimpleExampleReport:
    """
    σ = δ_{(0,0)}，ω_ρ = Σ_{k=1}^{K} δ_{(2^k, 2^{−ρk})}，f ≡ 1

    ρ ≤ ρ* = (1−α)/(1−β) 时特征量有界；ρ ≥ ρ* 时每个原子处的乘积二进极大函数
    至少为 λ₀ = 2^{α+β−2}，弱型商至少 λ₀·K^{1/q}。

    weak_lower_bound 是在固定水平 λ₀ 上的弱型商；ρ > ρ* 时完整弱型商随 K 指数增长。
    """
    if K < 8:
        raise ValueError(f"原子数 K 至少为 8: {K}")
    alpha, beta, p, q, rho = (float(v) for v in (alpha, beta, p, q, rho))
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise OperatorDomainError(f"需要 0 < alpha, beta < 1: alpha={alpha}, beta={beta}")
    if rho <= 0:
        raise ValueError(f"rho 必须为正: {rho}")
    rho_critical = (1 - alpha) / (1 - beta)

    ks = np.arange(1, K + 1, dtype=float)
    omega = Atomic(np.column_stack([2.0 ** ks, 2.0 ** (-rho * ks)]), np.ones(K))
    sigma = DiracOrigin()
    idx = ProductIndices(1, 1, p, q, alpha, beta)

    depth = math.ceil(rho * K) + 2
    lattice = RectangleLattice(1, 1, k_min=-depth, k_max=K + 2, shifts=0, seed=seed)
    characteristic = characteristic_sup(sigma, omega, idx, lattice)

    source = Atomic(np.zeros((1, 2)), np.ones(1))
    values, _ = product_dyadic_maximal(
        source, alpha, beta, DyadicConfig(-1, K + 2), DyadicConfig(-depth, 2), omega.points,
    )
    weak = weak_type_quotient(values, omega, q, 1.0)

    level = 2.0 ** (alpha + beta - 2)
    above = float(np.sum(omega.masses[values >= level * (1 - 1e-12)]))
    weak_lower = level * above ** (1 / q) if above > 0 else 0.0

    logger.info(
        f"simple 反例 rho={rho:g} (rho*={rho_critical:g}), K={K}: "
        f"A={characteristic.sup_value:.4g}, 弱型商={weak:.4g}, 下界={weak_lower:.4g}"
    )
    return SimpleExampleReport(
        rho=rho, rho_critical=rho_critical, alpha=alpha, beta=beta, p=p, q=q, atoms=K,
        characteristic=characteristic,
        characteristic_bounded=not characteristic.diverging,
        weak_quotient=weak, weak_lower_bound=weak_lower,
        maximal_values=values.tolist(), seed=seed,
    )


# ============================================================
# 半平衡幂权例子
# ============================================================

def example_half(p: Scalar = 2, q: Scalar = 4, m: int = 1, K: int = 32,
                 radii: Sequence[float] = tuple(2.0 ** k for k in range(-8, 9)),
                 quad: Optional[QuadratureConfig] = None) -> HalfExampleReport:
    """
    w(x) = (1+|x|)^{−m}，v(y) = |y|^{−m/q}，α = m(1/p − 1/q)

    (i) 中心立方体 [−R, R]^m 上的普通局部特征量有界；
    (ii) σ = v^{−p′} 的单尾壳层项 2^{kp′(α−m)}·σ(2^kQ)/σ(Q) 不衰减（齐次性给出恒为 1），
         部分和线性增长，中心立方体上的单尾局部值随 K 无界；
    (iii) σ ∈ A_{p′}：−m < mp′/q < m(p′−1)。
    """
    p = Fraction(p) if isinstance(p, int) else p
    q = Fraction(q) if isinstance(q, int) else q
    if not p < q:
        raise RegimeMismatchError(f"需要 p < q: p={p}, q={q}")
    p_prime = conjugate(p)
    alpha = m * (1 / p - 1 / q)
    pf, qf, af, ppf = float(p), float(q), float(alpha), float(p_prime)

    omega = Density(ShiftedPower(-m), qf)
    sigma = Density(RadialPower(-m / qf), -ppf)
    quad = quad or QuadratureConfig()
    radii = [float(r) for r in radii]
    local = [
        local_characteristic_1param(sigma, omega, (0.0,) * m, 2 * r, af, pf, qf, quad)
        for r in radii
    ]
    reference = local[int(np.argmin(np.abs(np.log(radii))))]
    bound_ratio = max(local) / reference if reference > 0 else math.inf

    # 单尾壳层项 2^{kp′(α−m)}·σ(2^kQ)/σ(Q)，Q = [−1, 1)^m，质量由 σ、ω 实际计算
    Q = Rectangle((0.0,) * m, (), 2.0, 1.0)
    sigma_table = dilate_mass_table(sigma, Q, K, quad)
    omega_mass = float(dilate_mass_table(omega, Q, 0, quad)[0])
    if not (sigma_table[0] > 0 and omega_mass > 0):
        raise FloatingPointError("中心立方体的质量为零")
    ks = np.arange(K + 1, dtype=float)
    terms = 2.0 ** (ppf * (af - m) * ks) * sigma_table / sigma_table[0]
    partial = np.cumsum(terms)
    shell_local = (Q.s ** (af - m) * omega_mass ** (1 / qf)
                   * (partial * sigma_table[0]) ** (1 / ppf))
    decay = growth_trend(terms.tolist())

    window = (float(-m), float(m * p_prime / q), float(m * (p_prime - 1)))
    member = -m < m * p_prime / q < m * (p_prime - 1)
    logger.info(
        f"half 例子 p={p}, q={q}, m={m}: 局部值比 {bound_ratio:.4g}, "
        f"单尾部分和 {partial[-1]:g}, 壳层项对数斜率 {decay:.3g}, A_p' 成员 {member}"
    )
    return HalfExampleReport(
        p=pf, q=qf, m=m, alpha=af, shells=K, radii=radii, local_values=local,
        plain_bound_ratio=bound_ratio, shell_terms=terms.tolist(),
        one_tailed_partial_sums=partial.tolist(), one_tailed_local_values=shell_local.tolist(),
        shell_decay_rate=decay, one_tailed_diverging=decay > -DEFAULT_DIVERGENCE_SLOPE,
        ap_window=window, ap_member=bool(member),
    )


# ============================================================
# 最优幂次
# ============================================================

JACOBI_NODES = 48


def _tail_integral(x: float, alpha: float, eps: float, nodes: Tuple[np.ndarray, np.ndarray]) -> float:
    """∫_{|u|>1} |x−u|^{α−1}|u|^{−1+ε} du，代换 u = 1/v 后用 Gauss–Jacobi 求积"""
    s, w = nodes
    b = -eps - alpha
    v = (1 + s) / 2
    g = (1 - x * v) ** (alpha - 1) + (1 + x * v) ** (alpha - 1)
    return float(2.0 ** (-b - 1) * np.dot(w, g))


def _factor_sharpness(p: float, q: float, eps: float) -> Tuple[float, float]:
    """
    单参数权重 w = |x|^{γ}，γq = −1+ε（R^1，p′ ≤ q）

    Returns:
        (A, N)：中心立方体上的特征量闭式，以及对偶检验函数 h = 1_{[−1,1]} 给出的范数下界
    """
    p_prime, q_prime = p / (p - 1), q / (q - 1)
    alpha = 1 / p - 1 / q
    c = -1 + eps
    s = (1 - eps) * p_prime / q
    A = (1 / eps) ** (1 / q) * (1 / (1 + s)) ** (1 / p_prime)

    # I_α(hω)(x) = C∞·|x|^{c+α} − T(x)
    c_inf = special.beta(c + 1, alpha) + special.beta(alpha, -c - alpha) + special.beta(c + 1, -c - alpha)
    e = c + alpha
    lam = e * p_prime + s + 1
    nodes = special.roots_jacobi(JACOBI_NODES, 0.0, -eps - alpha)
    main = c_inf ** p_prime * 0.5 ** lam / lam

    # x = y^κ 消去 x^{−α} 型端点奇异性
    kappa = 1 / (1 - alpha)

    def correction(y: float) -> float:
        x = y ** kappa
        full = c_inf * x ** e
        inner = full - _tail_integral(x, alpha, eps, nodes)
        if inner <= 0:
            return math.nan
        return (inner ** p_prime - full ** p_prime) * x ** s * kappa * y ** (kappa - 1)

    result = integrate.quad(correction, 0.0, 0.5 ** (1 / kappa), limit=200, full_output=1)
    if len(result) > 3 or not math.isfinite(result[0]):
        raise FloatingPointError(f"ε={eps:g} 的下界求积不收敛")
    J = main + result[0]
    if not J > 0:
        raise FloatingPointError(f"ε={eps:g} 的下界积分非正")
    N = (2 * J) ** (1 / p_prime) / (2 / eps) ** (1 / q_prime)
    return A, N


def _fit(log_a: np.ndarray, log_n: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(log_a, log_n, 1)
    residual = float(np.sqrt(np.mean((log_n - (slope * log_a + intercept)) ** 2)))
    return float(slope), residual


def sharpness_fit(p: Scalar, q: Scalar, m: int = 1, parameters: int = 1, family_size: int = 8,
                  start: int = 5) -> ExponentFit:
    """
    沿幂权族 ε_j = 2^{−j}（j = start..start+family_size−1）拟合 log N 对 log A 的斜率

    N 是范数的下界，因此拟合斜率只会低估最优指数。p′ > q 时改用对偶指数 (q′, p′)。
    两参数情形使用乘积权重 w(x)w(y)，特征量与下界都按因子相乘，斜率相加。
    """
    if m != 1:
        raise OperatorDomainError(f"最优幂次实验只实现 m = 1: m={m}")
    if parameters not in (1, 2):
        raise ValueError(f"parameters 必须为 1 或 2: {parameters}")
    if family_size < 5:
        raise ValueError(f"拟合至少需要 5 个族参数: {family_size}")
    if not p < q:
        raise RegimeMismatchError(f"平衡指数要求 p < q（α = 1/p − 1/q > 0）: p={p}, q={q}")
    target = float(optimal_exponent(p, q, parameters))
    pf, qf = float(p), float(q)
    if conjugate(pf) > qf:
        pf, qf = conjugate(qf), conjugate(pf)
    alpha = 1 / pf - 1 / qf

    family, chars, bounds, dropped = [], [], [], []
    for j in range(start, start + family_size):
        eps = 2.0 ** -j
        if eps >= 1 - alpha:
            dropped.append(eps)
            continue
        try:
            A, N = _factor_sharpness(pf, qf, eps)
        except FloatingPointError as e:
            logger.warning(f"丢弃族参数: {e}")
            dropped.append(eps)
            continue
        family.append(eps)
        chars.append(A)
        bounds.append(N)
    if len(family) < 5:
        raise FloatingPointError(f"有效族参数不足 5 个: 丢弃 {dropped}")

    log_a, log_n = np.log(chars), np.log(bounds)
    slope, residual = _fit(log_a, log_n)
    factor_slopes = [slope] * parameters
    if parameters == 2:
        chars = [a * a for a in chars]
        bounds = [b * b for b in bounds]
        _, residual = _fit(2 * log_a, 2 * log_n)
    fitted = float(sum(factor_slopes))
    logger.info(f"最优幂次拟合 p={p}, q={q}, parameters={parameters}: 斜率 {fitted:.4f} / 目标 {target:g}")
    return ExponentFit(
        parameters=parameters, family=family, characteristics=chars, lower_bounds=bounds,
        fitted_slope=fitted, target=target, residual=residual, dropped=dropped,
        factor_slopes=factor_slopes,
    )


DEFAULT_POWER_SAMPLES = (1.0, 0.5, 0.25, 0.125, 0.0625)


def one_tailed_vs_plain_power(p: Scalar, q: Scalar, m: int = 1,
                              samples: Sequence[float] = DEFAULT_POWER_SAMPLES,
                              lattice: Optional[RectangleLattice] = None, K: int = 512,
                              slack: float = 1.2,
                              quad: Optional[QuadratureConfig] = None) -> OneTailedPowerReport:
    """
    对幂权族 w = |x|^{γ}，γq = −m+ε，检查 Ā ≤ C·A^{1+max{p′/q, q/p′}}

    C 取 log(Ā/A^e) 的平均值，ratios = Ā/(C·A^e)；超过 slack 的样本计为违反。
    附带反向倍增检查：σ = w^{−p′} 是 m + (m−ε)p′/q 次齐次的，原点居中探针上的
    指数估计 δ̂ 应等于 1 + (m−ε)p′/(qm)；偏差超过 1e-6 时记录警告。
    """
    p_prime = conjugate(p)
    if not p < q:
        raise RegimeMismatchError(f"平衡指数要求 p < q: p={p}, q={q}")
    pf, qf, ppf = float(p), float(q), float(p_prime)
    alpha = m * (1 / pf - 1 / qf)
    exponent = float(optimal_exponent(p, q, 1))
    lattice = lattice or RectangleLattice(m, 0, k_min=-4, k_max=4, shifts=2)
    probes = [Rectangle((0.0,) * m, (), 2.0 ** k, 1.0) for k in (-4, 0, 4)]

    plain, tailed, inverse_delta, expected_delta = [], [], [], []
    for eps in samples:
        if not 0 < eps <= m:
            raise ValueError(f"ε 必须在 (0, m] 内: {eps}")
        gamma = (-m + eps) / qf
        weight = RadialPower(gamma)
        omega = Density(weight, qf)
        sigma = Density(weight, -ppf)
        A = characteristic_sup_1param(sigma, omega, m, alpha, pf, qf, lattice, quad=quad).sup_value
        A_bar = tailed_characteristic_1param(
            sigma, omega, m, alpha, pf, qf, lattice, K=K,
            kind=CharacteristicKind.ONE_TAILED, quad=quad,
        ).sup_value
        rd = reverse_doubling_estimate(sigma, probes, quad=quad)
        plain.append(A)
        tailed.append(A_bar)
        inverse_delta.append(1 / rd.epsilon)
        expected_delta.append(1 + (m - eps) * ppf / (qf * m))
        logger.debug(f"ε={eps:g}: A={A:.5g}, Ā={A_bar:.5g}, δ̂={rd.epsilon:.4g}")

    plain_arr, tailed_arr = np.array(plain), np.array(tailed)
    constant = float(np.exp(np.mean(np.log(tailed_arr) - exponent * np.log(plain_arr))))
    ratios = tailed_arr / (constant * plain_arr ** exponent)
    rd_error = float(np.max(np.abs(1 / np.array(inverse_delta) - expected_delta) / expected_delta))
    if rd_error > 1e-6:
        logger.warning(f"反向倍增指数偏离齐次次数: 相对误差 {rd_error:.3g}")
    violations = int(np.sum(ratios > slack))
    if violations:
        logger.warning(f"单尾幂次检查: {violations} 个样本超过 slack {slack}")
    return OneTailedPowerReport(
        exponent=exponent, constant=constant, samples=[float(e) for e in samples],
        plain=plain, one_tailed=tailed, ratios=ratios.tolist(), max_ratio=float(np.max(ratios)),
        violations=violations, slack=slack, rd_inverse_delta=inverse_delta,
        rd_expected_delta=expected_delta, rd_relative_error=rd_error,
    )
