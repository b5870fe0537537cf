#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
特征量模块

在矩形格点上计算三种特征量的下界：
- 普通特征量 A：s^{α−m}t^{β−n}·|R|_ω^{1/q}·|R|_σ^{1/p′}
- 单尾特征量 Ā：恰有一侧的质量换成二进壳层和
- 双尾特征量 Â：两侧都换成壳层和

壳层和 S_r(μ; R) = Σ_{k1,k2=0}^{K} 2^{k1(α−m)r}·2^{k2(β−n)r}·μ(2^{k1}I × 2^{k2}J)，
k = 0 项即普通质量（比较常数 C₀ = 1），因此离散层面 A ≤ Ā ≤ Â 精确成立。

格点是两个因子立方体列表的乘积（每个尺度：原点居中、原点角点、若干种子平移），
这使原子测度和可分离测度的质量矩阵可以写成因子矩阵的乘积。

发散按趋势诊断：第 j 层嵌套子格点 |k_s|+|k_t| ≤ j 上确界的对数斜率。
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from indices import ProductIndices
from laws import Regime, classify
from models.report_models import (
    CharacteristicKind,
    CharacteristicReport,
    EquivalenceReport,
    RectangleModel,
    ReverseDoublingReport,
    TestingReport,
)
from operators import OperatorDomainError, product_fractional_integral_at
from weights import (
    Atomic,
    Constant,
    Density,
    DiracOrigin,
    GridFunction,
    MeasureSpec,
    QuadratureConfig,
    Rectangle,
    ShiftedPower,
    DimensionMismatchError,
    dilate_mass_table,
    is_separable,
    minimal_dilation,
    rectangle_mass,
    rectangle_masses,
    separable_factors,
)

logger = logging.getLogger(__name__)

DEFAULT_DIVERGENCE_SLOPE = 0.02
DEFAULT_TAIL_TOLERANCE = 1e-6


class ReverseDoublingError(ValueError):
    """测度不满足反向倍增（或全部探针被排除）"""


class TestingWindowError(ValueError):
    """测试条件检查的区域或反向倍增指数窗口不满足"""
    __test__ = False  # pytest: not a test class


def lattice_quadrature(cells: int = 32) -> QuadratureConfig:
    """格点扫描使用的求积配置：不做自适应加倍，径向幂用精确极坐标质量"""
    return QuadratureConfig(cells=cells, max_doublings=0, prefer_closed_form=False)


# ============================================================
# 格点
# ============================================================

@dataclass(frozen=True)
class FactorCube:
    center: Tuple[float, ...]
    side: float
    k: int


@dataclass(frozen=True)
class RectangleLattice:
    """
    矩形格点：尺度 2^k，k ∈ [k_min, k_max]（每个因子独立）

    每个尺度的因子立方体：原点居中、原点角点，以及 shifts 个平移（中心 = 2^k·(j+ξ)，
    j ∈ {−2..2}，ξ ∈ [0,1)^d），随机数按 (seed, factor, k) 播种，因此扩大范围或增加平移数
    只会在原有立方体之外追加新的立方体。

    n = 0 表示单参数格点。
    """
    m: int = 1
    n: int = 1
    k_min: int = -12
    k_max: int = 12
    shifts: int = 8
    seed: int = 0xA1B2

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise ValueError(f"空的尺度范围: [{self.k_min}, {self.k_max}]")
        if self.shifts < 0:
            raise ValueError("shifts 不能为负")

    def factor_cubes(self, factor: int) -> List[FactorCube]:
        dim = self.m if factor == 1 else self.n
        if dim == 0:
            return [FactorCube((), 1.0, 0)]
        cubes: List[FactorCube] = []
        for k in range(self.k_min, self.k_max + 1):
            side = 2.0 ** k
            cubes.append(FactorCube((0.0,) * dim, side, k))
            cubes.append(FactorCube((side / 2,) * dim, side, k))
            rng = np.random.default_rng([self.seed, factor, k + 4096])
            for _ in range(self.shifts):
                j = rng.integers(-2, 3, size=dim)
                xi = rng.random(dim)
                cubes.append(FactorCube(tuple(float(v) for v in side * (j + xi)), side, k))
        return cubes

    def rectangles(self) -> List[Rectangle]:
        first = self.factor_cubes(1)
        second = self.factor_cubes(2)
        return [Rectangle(c1.center, c2.center, c1.side, c2.side) for c1 in first for c2 in second]

    @property
    def size(self) -> int:
        per_scale = 2 + self.shifts
        scales = self.k_max - self.k_min + 1
        return (per_scale * scales) * ((per_scale * scales) if self.n else 1)

    @property
    def nested_levels(self) -> int:
        return max(0, min(-self.k_min, self.k_max))

    def one_parameter(self, factor: int = 1) -> "RectangleLattice":
        """同一因子立方体列表的单参数格点（第二个因子的种子流保持不变）"""
        dim = self.m if factor == 1 else self.n
        return RectangleLattice(dim, 0, self.k_min, self.k_max, self.shifts, self.seed)


# ============================================================
# 质量与壳层矩阵
# ============================================================

def _factor_rect(cube: FactorCube) -> Rectangle:
    return Rectangle(cube.center, (), cube.side, 1.0)


def _containment(points: np.ndarray, cubes: Sequence[FactorCube]) -> np.ndarray:
    """C[u, a] = 原子 a 属于半开立方体 u"""
    if points.shape[1] == 0:
        return np.ones((len(cubes), points.shape[0]))
    centers = np.array([c.center for c in cubes])
    half = np.array([c.side / 2 for c in cubes])[:, None]
    lo = centers - half
    hi = centers + half
    inside = (points[None, :, :] >= lo[:, None, :]) & (points[None, :, :] < hi[:, None, :])
    return np.all(inside, axis=2).astype(float)


def _geometric_tail(kstar: np.ndarray, w: float, K: int) -> np.ndarray:
    """g(k*) = Σ_{k=k*}^{K} w^k（k* > K 时为 0）"""
    kstar = np.asarray(kstar)
    if w == 1.0:
        out = (K + 1 - kstar).astype(float)
    else:
        out = (w ** kstar.astype(float) - w ** (K + 1)) / (1.0 - w)
    return np.where(kstar > K, 0.0, out)


def _shell_factor(points: np.ndarray, cubes: Sequence[FactorCube], w: float, K: int) -> np.ndarray:
    if points.shape[1] == 0:
        return np.ones((len(cubes), points.shape[0]))
    rows = [_geometric_tail(minimal_dilation(points, c.center, c.side), w, K) for c in cubes]
    return np.array(rows)


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = np.outer(a, b)
    return np.where(np.isnan(out), 0.0, out)


def _as_atoms(mu: MeasureSpec, dim: int) -> Optional[Atomic]:
    if isinstance(mu, Atomic):
        if mu.points.shape[0] and mu.dim != dim:
            raise DimensionMismatchError(f"原子维数 {mu.dim} ≠ {dim}")
        return mu if mu.points.shape[0] else Atomic(np.zeros((0, dim)), np.zeros(0))
    if isinstance(mu, DiracOrigin):
        return Atomic(np.zeros((1, dim)), np.ones(1))
    return None


def _factor_vector(mu: MeasureSpec, cubes: Sequence[FactorCube], quad: QuadratureConfig,
                   w: Optional[float] = None, K: int = 0) -> np.ndarray:
    """单参数测度在因子立方体上的质量（w 给定时为壳层和）"""
    dim = len(cubes[0].center)
    atoms = _as_atoms(mu, dim)
    if atoms is not None:
        if atoms.points.shape[0] == 0:
            return np.zeros(len(cubes))
        if w is None:
            return _containment(atoms.points, cubes) @ atoms.masses
        return _shell_factor(atoms.points, cubes, w, K) @ atoms.masses
    if w is None:
        return rectangle_masses(mu, [_factor_rect(c) for c in cubes], quad)
    weights = w ** np.arange(K + 1, dtype=float)
    out = np.empty(len(cubes))
    for i, c in enumerate(cubes):
        table = dilate_mass_table(mu, _factor_rect(c), K, quad)
        with np.errstate(invalid="ignore"):
            out[i] = np.nansum(weights * table) if np.all(np.isfinite(table)) else math.inf
    return out


def _generic_block(mu: MeasureSpec, cubes1: Sequence[FactorCube], cubes2: Sequence[FactorCube],
                   quad: QuadratureConfig, shell: Optional[Tuple[float, float, int]]) -> np.ndarray:
    rects = [Rectangle(c1.center, c2.center, c1.side, c2.side) for c1 in cubes1 for c2 in cubes2]
    if shell is None:
        return rectangle_masses(mu, rects, quad).reshape(len(cubes1), len(cubes2))
    w1, w2, K = shell
    weights = np.outer(w1 ** np.arange(K + 1, dtype=float), w2 ** np.arange(K + 1, dtype=float))
    out = np.empty(len(rects))
    for i, R in enumerate(rects):
        table = dilate_mass_table(mu, R, K, quad)
        out[i] = float(np.sum(weights * table)) if np.all(np.isfinite(table)) else math.inf
    return out.reshape(len(cubes1), len(cubes2))


def _mass_matrix(mu: MeasureSpec, cubes1: Sequence[FactorCube], cubes2: Sequence[FactorCube],
                 m: int, n: int, quad: QuadratureConfig,
                 shell: Optional[Tuple[float, float, int]] = None,
                 max_workers: int = 1) -> np.ndarray:
    """
    M[u1, u2] = μ(I_{u1} × J_{u2})，shell 给定 (w1, w2, K) 时为壳层和

    原子测度：M = C1·diag(c)·C2ᵀ；可分离测度：因子向量外积；其余逐矩形计算。
    """
    if n == 0:
        w = shell[0] if shell else None
        K = shell[2] if shell else 0
        return _factor_vector(mu, cubes1, quad, w, K)[:, None]

    atoms = _as_atoms(mu, m + n)
    if atoms is not None:
        if atoms.points.shape[0] == 0:
            return np.zeros((len(cubes1), len(cubes2)))
        if shell is None:
            left = _containment(atoms.points[:, :m], cubes1)
            right = _containment(atoms.points[:, m:], cubes2)
        else:
            w1, w2, K = shell
            left = _shell_factor(atoms.points[:, :m], cubes1, w1, K)
            right = _shell_factor(atoms.points[:, m:], cubes2, w2, K)
        return (left * atoms.masses[None, :]) @ right.T

    if is_separable(mu):
        first, second = separable_factors(mu)
        w1 = shell[0] if shell else None
        w2 = shell[1] if shell else None
        K = shell[2] if shell else 0
        return _outer(_factor_vector(first, cubes1, quad, w1, K),
                      _factor_vector(second, cubes2, quad, w2, K))

    if max_workers > 1 and len(cubes1) > 1:
        chunks = np.array_split(np.arange(len(cubes1)), max_workers)
        job = partial(_generic_block, mu, cubes2=cubes2, quad=quad, shell=shell)
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            blocks = list(pool.map(job, [[cubes1[i] for i in chunk] for chunk in chunks]))
        return np.vstack(blocks)
    return _generic_block(mu, cubes1, cubes2, quad, shell)


# ============================================================
# 局部值与报告
# ============================================================

@dataclass
class LatticeScan:
    """一次格点扫描的全部局部值"""
    kind: CharacteristicKind
    values: np.ndarray
    cubes1: List[FactorCube]
    cubes2: List[FactorCube]
    variants: Optional[np.ndarray] = None
    shell_cutoff: Optional[int] = None
    shell_cutoff_warning: bool = False
    tail_certificate: Optional[float] = None

    def rectangle(self, u1: int, u2: int) -> Rectangle:
        c1, c2 = self.cubes1[u1], self.cubes2[u2]
        return Rectangle(c1.center, c2.center, c1.side, c2.side)

    def records(self) -> List[Dict[str, Any]]:
        """逐矩形局部值（CSV 导出用）"""
        rows = []
        for u1, c1 in enumerate(self.cubes1):
            for u2, c2 in enumerate(self.cubes2):
                rows.append({
                    "k_s": c1.k, "k_t": c2.k, "s": c1.side, "t": c2.side,
                    "center1": list(c1.center), "center2": list(c2.center),
                    "value": float(self.values[u1, u2]),
                })
        return rows


def _powers(sides: np.ndarray, exponent: float) -> np.ndarray:
    return sides ** exponent


def _local_values(idx: ProductIndices, cubes1, cubes2, omega_mass: np.ndarray,
                  sigma_mass: np.ndarray, n: int) -> np.ndarray:
    alpha, beta = float(idx.alpha), float(idx.beta)
    q, p_prime = float(idx.q), float(idx.p_prime)
    s = np.array([c.side for c in cubes1])
    pre = _powers(s, alpha - idx.m)[:, None]
    if n:
        t = np.array([c.side for c in cubes2])
        pre = pre * _powers(t, beta - n)[None, :]
    with np.errstate(invalid="ignore", over="ignore"):
        out = pre * omega_mass ** (1 / q) * sigma_mass ** (1 / p_prime)
    zero = (omega_mass == 0) | (sigma_mass == 0)
    return np.where(zero, 0.0, out)


def growth_trend(scale_sups: Sequence[float]) -> float:
    """
    ln(sup_j) 对 j 的最小二乘斜率，只用后一半层级

    任何层级为 +∞ 时返回 +∞。
    """
    sups = np.asarray(scale_sups, dtype=float)
    if np.any(np.isinf(sups)):
        return math.inf
    J = len(sups) - 1
    if J < 2:
        return 0.0
    js = np.arange(J // 2, J + 1)
    vals = sups[js]
    keep = vals > 0
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(js[keep], np.log(vals[keep]), 1)[0])


def _nested_sups(values: np.ndarray, cubes1, cubes2, levels: int) -> List[float]:
    k1 = np.array([abs(c.k) for c in cubes1])[:, None]
    k2 = np.array([abs(c.k) for c in cubes2])[None, :]
    dist = k1 + k2
    sups = []
    for j in range(levels + 1):
        mask = dist <= j
        sups.append(float(np.max(values[mask])) if np.any(mask) else 0.0)
    return sups


def _report(scan: LatticeScan, levels: int, threshold: float) -> CharacteristicReport:
    values = scan.values
    flat = int(np.argmax(values))  # 首个最大值：按枚举顺序的全序
    u1, u2 = np.unravel_index(flat, values.shape)
    sup_value = float(values[u1, u2])
    sups = _nested_sups(values, scan.cubes1, scan.cubes2, levels)
    trend = growth_trend(sups)
    diverging = bool(math.isinf(sup_value) or trend > threshold)
    c1, c2 = scan.cubes1[u1], scan.cubes2[u2]
    argmax = RectangleModel(center1=list(c1.center), center2=list(c2.center), s=c1.side, t=c2.side)
    variant = None
    if scan.variants is not None:
        variant = "omega" if scan.variants[u1, u2] else "sigma"
    if diverging:
        logger.info(f"{scan.kind.value} 特征量发散: trend={trend:.4g}, sup={sup_value:.4g}")
    return CharacteristicReport(
        kind=scan.kind,
        sup_value=sup_value,
        argmax=argmax,
        growth_trend=trend,
        diverging=diverging,
        lattice_size=int(values.size),
        scale_sups=sups,
        shell_cutoff=scan.shell_cutoff,
        shell_cutoff_warning=scan.shell_cutoff_warning,
        tail_certificate=scan.tail_certificate,
        variant=variant,
    )


# ============================================================
# 公共操作
# ============================================================

def local_characteristic(sigma: MeasureSpec, omega: MeasureSpec, R: Rectangle,
                         idx: ProductIndices, quad: Optional[QuadratureConfig] = None) -> float:
    """s^{α−m}·t^{β−n}·|R|_ω^{1/q}·|R|_σ^{1/p′}"""
    if R.m != idx.m or R.n != idx.n:
        raise DimensionMismatchError("矩形维数与指数不一致")
    quad = quad or QuadratureConfig()
    mw = rectangle_mass(omega, R, quad)
    ms = rectangle_mass(sigma, R, quad)
    if mw == 0 or ms == 0:
        return 0.0
    return (R.s ** (float(idx.alpha) - idx.m) * R.t ** (float(idx.beta) - idx.n)
            * mw ** (1 / float(idx.q)) * ms ** (1 / float(idx.p_prime)))


def scan_plain(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
               lattice: RectangleLattice, quad: Optional[QuadratureConfig] = None,
               max_workers: int = 1) -> LatticeScan:
    quad = quad or lattice_quadrature()
    cubes1, cubes2 = lattice.factor_cubes(1), lattice.factor_cubes(2)
    n = lattice.n
    mw = _mass_matrix(omega, cubes1, cubes2, lattice.m, n, quad, max_workers=max_workers)
    ms = _mass_matrix(sigma, cubes1, cubes2, lattice.m, n, quad, max_workers=max_workers)
    values = _local_values(idx, cubes1, cubes2, mw, ms, n)
    return LatticeScan(CharacteristicKind.PLAIN, values, cubes1, cubes2)


def characteristic_sup(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                       lattice: Optional[RectangleLattice] = None,
                       quad: Optional[QuadratureConfig] = None,
                       threshold: float = DEFAULT_DIVERGENCE_SLOPE,
                       max_workers: int = 1) -> CharacteristicReport:
    """
    普通特征量在格点上的最大值（真实上确界的下界）与增长趋势
    """
    lattice = lattice or RectangleLattice(idx.m, idx.n)
    _check_lattice(lattice, idx)
    scan = scan_plain(sigma, omega, idx, lattice, quad, max_workers)
    return _report(scan, lattice.nested_levels, threshold)


def _check_lattice(lattice: RectangleLattice, idx: ProductIndices) -> None:
    if lattice.m != idx.m or (lattice.n and lattice.n != idx.n):
        raise DimensionMismatchError(
            f"格点维数 ({lattice.m}, {lattice.n}) 与指数 ({idx.m}, {idx.n}) 不一致"
        )


def scan_tailed(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                lattice: RectangleLattice, K: int, kind: CharacteristicKind,
                quad: Optional[QuadratureConfig] = None,
                tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                max_workers: int = 1) -> LatticeScan:
    alpha, beta = float(idx.alpha), float(idx.beta)
    if alpha >= idx.m or (lattice.n and beta >= idx.n):
        raise OperatorDomainError("尾部特征量要求 alpha < m 且 beta < n")
    if K < 1:
        raise ValueError("壳层数 K 至少为 1")
    quad = quad or lattice_quadrature()
    cubes1, cubes2 = lattice.factor_cubes(1), lattice.factor_cubes(2)
    m, n = lattice.m, lattice.n
    q, p_prime = float(idx.q), float(idx.p_prime)

    def shells(mu: MeasureSpec, r: float, cutoff: int) -> np.ndarray:
        w1 = 2.0 ** ((alpha - m) * r)
        w2 = 2.0 ** ((beta - n) * r) if n else 1.0
        return _mass_matrix(mu, cubes1, cubes2, m, n, quad, (w1, w2, cutoff), max_workers)

    s_omega = shells(omega, q, K)
    s_sigma = shells(sigma, p_prime, K)

    # 最后一层壳的相对贡献
    rel = 0.0
    for mu, r, full in ((omega, q, s_omega), (sigma, p_prime, s_sigma)):
        prev = shells(mu, r, K - 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = (full - prev) / full
        ratio = ratio[np.isfinite(ratio) & (full > 0)]
        if ratio.size:
            rel = max(rel, float(np.max(ratio)))
    warning = rel > tail_tolerance
    if warning:
        logger.warning(f"壳层截断 K={K} 不足: 最后一层相对贡献 {rel:.3g}")
    growth = max(2.0 ** ((alpha - m) * r + m) for r in (q, p_prime))
    if n:
        growth = max(growth, max(2.0 ** ((beta - n) * r + n) for r in (q, p_prime)))
    certificate = rel * growth / (1 - growth) if growth < 1 else None

    if kind is CharacteristicKind.TWO_TAILED:
        values = _local_values(idx, cubes1, cubes2, s_omega, s_sigma, n)
        variants = None
    else:
        mw = _mass_matrix(omega, cubes1, cubes2, m, n, quad, max_workers=max_workers)
        ms = _mass_matrix(sigma, cubes1, cubes2, m, n, quad, max_workers=max_workers)
        omega_side = _local_values(idx, cubes1, cubes2, s_omega, ms, n)
        sigma_side = _local_values(idx, cubes1, cubes2, mw, s_sigma, n)
        values = np.maximum(omega_side, sigma_side)
        variants = omega_side >= sigma_side
    return LatticeScan(kind, values, cubes1, cubes2, variants, K, warning, certificate)


def tailed_characteristic(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                          lattice: Optional[RectangleLattice] = None, K: int = 40,
                          kind: CharacteristicKind = CharacteristicKind.TWO_TAILED,
                          quad: Optional[QuadratureConfig] = None,
                          threshold: float = DEFAULT_DIVERGENCE_SLOPE,
                          tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                          max_workers: int = 1) -> CharacteristicReport:
    """
    单尾（kind=ONE_TAILED）或双尾特征量在格点上的最大值

    单尾特征量对两种变体（ω 侧壳层或 σ 侧壳层）逐矩形取较大者，variant 记录最大值所在的一侧。
    """
    kind = CharacteristicKind(kind)
    if kind is CharacteristicKind.PLAIN:
        return characteristic_sup(sigma, omega, idx, lattice, quad, threshold, max_workers)
    lattice = lattice or RectangleLattice(idx.m, idx.n)
    _check_lattice(lattice, idx)
    scan = scan_tailed(sigma, omega, idx, lattice, K, kind, quad, tail_tolerance, max_workers)
    return _report(scan, lattice.nested_levels, threshold)


def characteristic_scan(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                        lattice: Optional[RectangleLattice] = None, K: int = 40,
                        kind: CharacteristicKind = CharacteristicKind.PLAIN,
                        quad: Optional[QuadratureConfig] = None,
                        threshold: float = DEFAULT_DIVERGENCE_SLOPE,
                        max_workers: int = 1) -> Tuple[LatticeScan, CharacteristicReport]:
    """同时返回逐矩形扫描（供 CSV 导出）与汇总报告"""
    kind = CharacteristicKind(kind)
    lattice = lattice or RectangleLattice(idx.m, idx.n)
    _check_lattice(lattice, idx)
    if kind is CharacteristicKind.PLAIN:
        scan = scan_plain(sigma, omega, idx, lattice, quad, max_workers)
    else:
        scan = scan_tailed(sigma, omega, idx, lattice, K, kind, quad, max_workers=max_workers)
    return scan, _report(scan, lattice.nested_levels, threshold)


# ---------- 单参数版本 ----------

def _one_param_indices(m: int, alpha: float, p: float, q: float) -> ProductIndices:
    # 第二个因子取 n = 1、β = 0；单参数格点上 t ≡ 1，第二因子不参与
    return ProductIndices(m=m, n=1, p=p, q=q, alpha=alpha, beta=0)


def local_characteristic_1param(sigma: MeasureSpec, omega: MeasureSpec,
                                center: Sequence[float], side: float, alpha: float,
                                p: float, q: float,
                                quad: Optional[QuadratureConfig] = None) -> float:
    """ℓ^{α−m}·ω(Q)^{1/q}·σ(Q)^{1/p′}，Q ⊂ R^m"""
    quad = quad or QuadratureConfig()
    Q = Rectangle(tuple(center), (), side, 1.0)
    mw = rectangle_mass(omega, Q, quad)
    ms = rectangle_mass(sigma, Q, quad)
    if mw == 0 or ms == 0:
        return 0.0
    p_prime = p / (p - 1)
    return side ** (alpha - Q.m) * mw ** (1 / q) * ms ** (1 / p_prime)


def characteristic_sup_1param(sigma: MeasureSpec, omega: MeasureSpec, m: int, alpha: float,
                              p: float, q: float, lattice: RectangleLattice, factor: int = 1,
                              quad: Optional[QuadratureConfig] = None,
                              threshold: float = DEFAULT_DIVERGENCE_SLOPE) -> CharacteristicReport:
    """R^m 上立方体格点的普通特征量；factor 选择使用乘积格点的哪一个因子列表"""
    one = _factor_lattice(lattice, factor, m)
    idx = _one_param_indices(m, alpha, p, q)
    scan = _with_factor(scan_plain, one, lattice, factor, sigma, omega, idx, quad)
    return _report(scan, one.nested_levels, threshold)


def tailed_characteristic_1param(sigma: MeasureSpec, omega: MeasureSpec, m: int, alpha: float,
                                 p: float, q: float, lattice: RectangleLattice, K: int = 40,
                                 kind: CharacteristicKind = CharacteristicKind.TWO_TAILED,
                                 factor: int = 1, quad: Optional[QuadratureConfig] = None,
                                 threshold: float = DEFAULT_DIVERGENCE_SLOPE,
                                 tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> CharacteristicReport:
    one = _factor_lattice(lattice, factor, m)
    idx = _one_param_indices(m, alpha, p, q)
    kind = CharacteristicKind(kind)
    if kind is CharacteristicKind.PLAIN:
        return characteristic_sup_1param(sigma, omega, m, alpha, p, q, lattice, factor, quad, threshold)
    scan = _with_factor(
        lambda s, w, i, lat, qd: scan_tailed(s, w, i, lat, K, kind, qd, tail_tolerance),
        one, lattice, factor, sigma, omega, idx, quad,
    )
    return _report(scan, one.nested_levels, threshold)


def _factor_lattice(lattice: RectangleLattice, factor: int, m: int) -> RectangleLattice:
    dim = lattice.m if factor == 1 else lattice.n
    if dim != m:
        raise DimensionMismatchError(f"第 {factor} 个因子的维数 {dim} ≠ {m}")
    return lattice.one_parameter(factor)


def _with_factor(scan_fn, one: RectangleLattice, lattice: RectangleLattice, factor: int,
                 sigma, omega, idx, quad) -> LatticeScan:
    """用乘积格点第 factor 个因子的立方体列表执行单参数扫描"""
    if factor == 1:
        return scan_fn(sigma, omega, idx, one, quad)
    cubes = lattice.factor_cubes(2)
    view = _FactorView(one, cubes)
    return scan_fn(sigma, omega, idx, view, quad)


class _FactorView(RectangleLattice):
    """单参数格点视图：第一个因子列表替换为给定的立方体列表"""

    def __init__(self, base: RectangleLattice, cubes: List[FactorCube]):
        object.__setattr__(self, "_cubes", cubes)
        super().__init__(base.m, 0, base.k_min, base.k_max, base.shifts, base.seed)

    def factor_cubes(self, factor: int) -> List[FactorCube]:
        if factor == 1:
            return list(self._cubes)
        return [FactorCube((), 1.0, 0)]


# ============================================================
# Dirac 范数
# ============================================================

def _factor_dirac_integral(mu: MeasureSpec, exponent: float, dim: int) -> float:
    """∫_{R^dim} |x|^{exponent} dμ(x)（单参数测度）"""
    if isinstance(mu, Atomic):
        if mu.points.shape[0] == 0:
            return 0.0
        r = np.linalg.norm(mu.points, axis=1)
        with np.errstate(divide="ignore"):
            vals = np.power(r, exponent)
        return float(np.sum(vals * mu.masses))
    if isinstance(mu, DiracOrigin):
        return math.inf if exponent < 0 else (1.0 if exponent == 0 else 0.0)
    if isinstance(mu, Density):
        w, r = mu.weight, mu.power
        if isinstance(w, ShiftedPower):
            # 极坐标：ω_{d−1}·B(c, −e−c)，c = exponent + d，e = 幂次
            c = exponent + dim
            e = w.exponent * r
            if c <= 0 or -e - c <= 0:
                return math.inf
            surface = 2 * math.pi ** (dim / 2) / special.gamma(dim / 2)
            return float(surface * special.beta(c, -e - c))
        return math.inf
    raise DimensionMismatchError(f"无法在因子上积分 {type(mu).__name__}")


def dirac_norm(omega: MeasureSpec, idx: ProductIndices) -> float:
    """
    (∬ |x|^{(α−m)q}|y|^{(β−n)q} dω)^{1/q}

    原子测度精确求和；可分离平移幂密度用 Beta 函数闭式；其余（或坐标超平面上的原子）返回 +∞。
    """
    q = float(idx.q)
    a = (float(idx.alpha) - idx.m) * q
    b = (float(idx.beta) - idx.n) * q
    m = idx.m
    if isinstance(omega, Atomic):
        if omega.points.shape[0] == 0:
            return 0.0
        if omega.dim != idx.m + idx.n:
            raise DimensionMismatchError(f"原子维数 {omega.dim} ≠ m+n")
        rx = np.linalg.norm(omega.points[:, :m], axis=1)
        ry = np.linalg.norm(omega.points[:, m:], axis=1)
        if np.any(rx == 0) or np.any(ry == 0):
            logger.warning("ω 在坐标超平面上有原子，Dirac 范数为 +∞")
            return math.inf
        total = float(np.sum(rx ** a * ry ** b * omega.masses))
        return total ** (1 / q)
    if isinstance(omega, DiracOrigin):
        return math.inf
    if is_separable(omega) and not (isinstance(omega, Density) and isinstance(omega.weight, Constant)):
        first, second = separable_factors(omega)
        left = _factor_dirac_integral(first, a, idx.m)
        right = _factor_dirac_integral(second, b, idx.n)
        if left == 0 or right == 0:
            return 0.0
        return (left * right) ** (1 / q)
    return math.inf


# ============================================================
# 反向倍增
# ============================================================

def reverse_doubling_estimate(mu: MeasureSpec, probes: Sequence[Rectangle], halvings: int = 6,
                              factor: Optional[int] = None,
                              quad: Optional[QuadratureConfig] = None) -> ReverseDoublingReport:
    """
    拟合 log(|2^{−j}R|_μ/|R|_μ) ≈ −j·d·ε̂·ln2，j = 1..halvings

    factor=None 同时缩小两个因子（d = m+n）；factor=1/2 只缩小对应因子（d = m 或 n）。
    在某次缩小后质量为零（或无穷）的探针被排除。

    Raises:
        ReverseDoublingError: 全部探针被排除
    """
    if not probes:
        raise ReverseDoublingError("没有探针矩形")
    quad = quad or QuadratureConfig()
    m, n = probes[0].m, probes[0].n
    dim = {None: m + n, 1: m, 2: n}[factor]
    js = np.arange(1, halvings + 1, dtype=float)
    slopes, points = [], []
    excluded = 0
    for R in probes:
        base = rectangle_mass(mu, R, quad)
        shrunk = []
        for j in js:
            k1 = -j if factor in (None, 1) else 0
            k2 = -j if factor in (None, 2) else 0
            shrunk.append(rectangle_mass(mu, R.dilate(k1, k2), quad))
        shrunk = np.array(shrunk)
        if not (0 < base < math.inf) or np.any(shrunk <= 0) or not np.all(np.isfinite(shrunk)):
            excluded += 1
            continue
        y = np.log(shrunk / base)
        points.append(y)
    if not points:
        raise ReverseDoublingError(f"全部 {len(probes)} 个探针被排除（测度不满足反向倍增）")
    if excluded:
        logger.warning(f"反向倍增估计排除了 {excluded} 个探针")

    ys = np.concatenate(points)
    jj = np.tile(js, len(points))
    epsilon = float(-np.sum(jj * ys) / (dim * math.log(2) * np.sum(jj * jj)))
    per_point = -ys / (jj * dim * math.log(2))
    residual = float(np.sqrt(np.mean((per_point - epsilon) ** 2)))
    return ReverseDoublingReport(
        epsilon=epsilon,
        residual=residual,
        dimension=dim,
        factor=factor,
        halvings=halvings,
        used_probes=len(points),
        excluded_probes=excluded,
    )


def default_probes(m: int, n: int, scales: Sequence[int] = (-4, 0, 4, 8)) -> List[Rectangle]:
    """原点居中与原点角点的探针，覆盖小、中、大尺度"""
    probes = []
    for k in scales:
        side = 2.0 ** k
        probes.append(Rectangle.centered(m, n, side, side))
        probes.append(Rectangle.cornered(m, n, side, side))
        probes.append(Rectangle((side * 3.0,) * m, (side * 3.0,) * n, side, side))
    return probes


def _require_reverse_doubling(name: str, report: ReverseDoublingReport, limit: float) -> None:
    if report.epsilon <= 0 or report.residual >= limit:
        raise ReverseDoublingError(
            f"{name} 不满足反向倍增: epsilon={report.epsilon:.4g}, residual={report.residual:.4g}"
        )


def equivalence_check(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                      lattice: Optional[RectangleLattice] = None, K: int = 40,
                      probes: Optional[Sequence[Rectangle]] = None, halvings: int = 6,
                      residual_limit: float = 0.05,
                      quad: Optional[QuadratureConfig] = None) -> EquivalenceReport:
    """
    反向倍增测度上三种特征量的比值 Â/Ā 与 Ā/A

    Raises:
        ReverseDoublingError: σ 或 ω 的反向倍增估计不合格（ε̂ ≤ 0 或残差过大）
    """
    lattice = lattice or RectangleLattice(idx.m, idx.n)
    probes = list(probes) if probes is not None else default_probes(idx.m, idx.n)
    rd_sigma = reverse_doubling_estimate(sigma, probes, halvings)
    rd_omega = reverse_doubling_estimate(omega, probes, halvings)
    _require_reverse_doubling("sigma", rd_sigma, residual_limit)
    _require_reverse_doubling("omega", rd_omega, residual_limit)

    plain = characteristic_sup(sigma, omega, idx, lattice, quad)
    one = tailed_characteristic(sigma, omega, idx, lattice, K, CharacteristicKind.ONE_TAILED, quad)
    two = tailed_characteristic(sigma, omega, idx, lattice, K, CharacteristicKind.TWO_TAILED, quad)
    return EquivalenceReport(
        hat_over_bar=_ratio(two.sup_value, one.sup_value),
        bar_over_plain=_ratio(one.sup_value, plain.sup_value),
        plain=plain,
        one_tailed=one,
        two_tailed=two,
        epsilon_sigma=rd_sigma.epsilon,
        epsilon_omega=rd_omega.epsilon,
    )


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return math.inf if a > 0 else 1.0
    return a / b


# ============================================================
# 测试条件（T1）
# ============================================================

def testing_window(idx: ProductIndices) -> Tuple[float, float]:
    """反向倍增指数窗口 (1 − θ, (1 − θ)/(1/q + 1/p′))，θ = min{α/m, β/n}"""
    theta = min(float(idx.alpha) / idx.m, float(idx.beta) / idx.n)
    lo = 1 - theta
    hi = lo / (1 / float(idx.q) + 1 / float(idx.p_prime))
    return lo, hi


def _density_grid(mu: MeasureSpec, box: Tuple[float, float, float, float], resolution: int) -> GridFunction:
    if not isinstance(mu, Density):
        raise TestingWindowError("测试条件的网格路径只支持密度测度")
    weight, power = mu.weight, mu.power

    def values(xx, yy):
        pts_x = xx.reshape(-1, 1)
        pts_y = yy.reshape(-1, 1)
        v = weight.value_at(pts_x, pts_y) ** power
        return v.reshape(xx.shape)

    grid = GridFunction.from_function(box, (resolution, resolution), values)
    return grid


def _testing_quotient(source_mu: MeasureSpec, target_mu: MeasureSpec, R: Rectangle,
                      alpha: float, beta: float, r: float, r_src: float, resolution: int,
                      box_factor: float, quad: QuadratureConfig) -> Optional[Tuple[float, float]]:
    """(∬ I(1_R μ)^r dν)^{1/r} 与 |R|_μ^{1/r_src}；|R|_μ = 0 时返回 None"""
    mass = rectangle_mass(source_mu, R, quad)
    if not mass > 0 or not math.isfinite(mass):
        return None
    (x0, x1), (y0, y1) = (R.lower[0], R.upper[0]), (R.lower[1], R.upper[1])
    source = _density_grid(source_mu, (x0, x1, y0, y1), resolution)
    cx, cy = R.center1[0], R.center2[0]
    hx, hy = box_factor * R.s / 2, box_factor * R.t / 2
    target = _density_grid(target_mu, (cx - hx, cx + hx, cy - hy, cy + hy), resolution)
    xx, yy = np.meshgrid(target.midpoints1, target.midpoints2, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    values = product_fractional_integral_at(source, alpha, beta, pts)
    integral = float(np.sum(values ** r * target.values.ravel()) * target.cell_area)
    return integral ** (1 / r), mass ** (1 / r_src)


def testing_condition_check(sigma: MeasureSpec, omega: MeasureSpec, idx: ProductIndices,
                            rectangles: Sequence[Rectangle],
                            characteristic: Optional[float] = None,
                            lattice: Optional[RectangleLattice] = None,
                            resolution: int = 128, box_factor: float = 8.0,
                            enforce_window: bool = True,
                            probes: Optional[Sequence[Rectangle]] = None,
                            quad: Optional[QuadratureConfig] = None) -> TestingReport:
    """
    测试条件商 (∬ I(1_R σ)^q dω)^{1/q} / (A·|R|_σ^{1/p}) 及其对偶版本

    积分限制在以 R 为中心、box_factor 倍大小的盒子上（因此是下界）。

    Raises:
        TestingWindowError: 非 m = n = 1、非严格次平衡，或 enforce_window 时反向倍增指数不在窗口内
    """
    if idx.m != 1 or idx.n != 1:
        raise TestingWindowError("测试条件检查只支持 m = n = 1")
    regime = classify(idx)
    if regime is not Regime.STRICTLY_SUBBALANCED:
        raise TestingWindowError(f"需要严格次平衡指数，实际为 {regime.value}")
    window = testing_window(idx)
    quad = quad or QuadratureConfig()

    epsilon = None
    if enforce_window:
        probes = list(probes) if probes is not None else default_probes(1, 1)
        eps = [reverse_doubling_estimate(mu, probes).epsilon for mu in (sigma, omega)]
        epsilon = min(eps)
        for e in eps:
            if not window[0] < e < window[1]:
                raise TestingWindowError(
                    f"反向倍增指数 {e:.4g} 不在窗口 ({window[0]:.4g}, {window[1]:.4g}) 内"
                )

    if characteristic is None:
        lattice = lattice or RectangleLattice(1, 1, -6, 6, 2)
        characteristic = characteristic_sup(sigma, omega, idx, lattice).sup_value
    if not characteristic > 0:
        raise TestingWindowError("特征量为零，商无定义")

    alpha, beta = float(idx.alpha), float(idx.beta)
    q, p = float(idx.q), float(idx.p)
    p_prime, q_prime = float(idx.p_prime), float(idx.q_prime)
    quotients, dual_quotients = [], []
    skipped = 0
    for R in rectangles:
        direct = _testing_quotient(sigma, omega, R, alpha, beta, q, p, resolution, box_factor, quad)
        dual = _testing_quotient(omega, sigma, R, alpha, beta, p_prime, q_prime, resolution, box_factor, quad)
        if direct is None or dual is None:
            skipped += 1
            continue
        quotients.append(direct[0] / (characteristic * direct[1]))
        dual_quotients.append(dual[0] / (characteristic * dual[1]))
    if skipped:
        logger.info(f"测试条件检查跳过 {skipped} 个零质量矩形")
    return TestingReport(
        max_quotient=max(quotients, default=0.0),
        max_dual_quotient=max(dual_quotients, default=0.0),
        characteristic=characteristic,
        quotients=quotients,
        dual_quotients=dual_quotients,
        skipped=skipped,
        window=window,
        epsilon=epsilon,
    )
