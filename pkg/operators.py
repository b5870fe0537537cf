#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
算子模块

分数次积分、迭代分解、尾函数与二进极大算子的数值实现：
1. 一维分数次积分 I_α：核 |x−u|^{α−1} 在每个网格单元上精确积分（原函数 sign(v)|v|^α/α），
   网格到网格的离散算子是对称 Toeplitz 矩阵
2. 乘积分数次积分 I_{α,β}：先沿第一轴、再沿第二轴迭代（两种顺序一致）
3. 尾函数 ŝ_{I×J} 与核下界
4. 一参数与乘积二进分数次极大函数（原子测度上精确计算）、弱型商
5. 双线性形式给出的范数下界（检验函数对）

网格路径只支持 m = n = 1；高维通过原子测度与闭式计算。
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import toeplitz

from weights import Atomic, DimensionMismatchError, GridFunction, Rectangle

logger = logging.getLogger(__name__)


class OperatorDomainError(ValueError):
    """算子参数超出定义域"""


# ============================================================
# 尾函数
# ============================================================

@dataclass(frozen=True)
class TailFunction:
    """
    ŝ_{I×J}(x,y) = (1 + |x−c_I|/s)^{α−m}·(1 + |y−c_J|/t)^{β−n}

    要求 α < m、β < n，否则取值可能超过 1。
    """
    rectangle: Rectangle
    alpha: float
    beta: float
    m: int = 1
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if self.alpha >= self.m or self.beta >= self.n:
            raise OperatorDomainError(
                f"尾函数要求 alpha < m 且 beta < n: alpha={self.alpha}, beta={self.beta}"
            )
        if self.rectangle.m != self.m or self.rectangle.n != self.n:
            raise DimensionMismatchError("矩形维数与尾函数维数不一致")

    def first(self, x: np.ndarray) -> np.ndarray:
        """第一个因子 (1 + |x−c_I|/s)^{α−m}，x 形状 (K, m)"""
        R = self.rectangle
        d = np.linalg.norm(np.atleast_2d(x) - np.asarray(R.center1)[None, :], axis=1)
        return (1.0 + d / R.s) ** (self.alpha - self.m)

    def second(self, y: np.ndarray) -> np.ndarray:
        R = self.rectangle
        d = np.linalg.norm(np.atleast_2d(y) - np.asarray(R.center2)[None, :], axis=1)
        return (1.0 + d / R.t) ** (self.beta - self.n)

    def values(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.m + self.n:
            raise DimensionMismatchError(f"点维数 {pts.shape[1]} ≠ m+n = {self.m + self.n}")
        return self.first(pts[:, :self.m]) * self.second(pts[:, self.m:])


def tail_value(tf: TailFunction, point: Sequence[float]) -> float:
    return float(tf.values(np.asarray(point, dtype=float)[None, :])[0])


def product_kernel(x: np.ndarray, y: np.ndarray, u: np.ndarray, t: np.ndarray,
                   alpha: float, beta: float, m: int = 1, n: int = 1) -> np.ndarray:
    """
    |x−u|^{α−m}|y−t|^{β−n}，重合坐标为 +∞

    最后一维是因子坐标（长度 m 或 n），其余维按 numpy 规则广播。
    """
    dx = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(u, dtype=float), axis=-1)
    dy = np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(t, dtype=float), axis=-1)
    with np.errstate(divide="ignore"):
        return np.power(dx, alpha - m) * np.power(dy, beta - n)


# ============================================================
# 一维与乘积分数次积分（m = n = 1 网格路径）
# ============================================================

def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise OperatorDomainError(f"一维网格路径要求 0 < alpha < 1，实际为 {alpha}")
    return alpha


def _kernel_antiderivative(v: np.ndarray, alpha: float) -> np.ndarray:
    """∫_0^v |u|^{α−1} du = sign(v)|v|^α/α"""
    return np.sign(v) * np.abs(v) ** alpha / alpha


def cell_weights(edges: np.ndarray, points: np.ndarray, alpha: float) -> np.ndarray:
    """W[i, j] = ∫_{edges[j]}^{edges[j+1]} |points[i] − u|^{α−1} du"""
    alpha = _check_order(alpha)
    anti = _kernel_antiderivative(edges[None, :] - np.asarray(points, dtype=float)[:, None], alpha)
    return anti[:, 1:] - anti[:, :-1]


def toeplitz_operator(size: int, h: float, alpha: float) -> np.ndarray:
    """
    网格到网格的离散算子：偏移 j 个单元处的单元精确积分

    中心单元为 2(h/2)^α/α。
    """
    alpha = _check_order(alpha)
    j = np.arange(size, dtype=float)
    upper = ((j + 0.5) * h) ** alpha
    lower = np.abs(j - 0.5) * h
    column = (upper - np.sign(j - 0.5) * lower ** alpha) / alpha
    return toeplitz(column)


def fractional_integral_1d(values: np.ndarray, lower: float, upper: float, alpha: float,
                           points: Optional[np.ndarray] = None) -> np.ndarray:
    """
    一维分数次积分 I_α f(x) = ∫ |x−u|^{α−1} f(u) du

    Args:
        values: [lower, upper] 上均匀网格的单元值（f 在单元上视为常数）
        alpha: 0 < α < 1
        points: 评估点；None 表示在同一网格的单元中点上评估

    Returns:
        评估点上的值
    """
    f = np.asarray(values, dtype=float)
    if f.ndim != 1:
        raise OperatorDomainError("values 必须是一维数组")
    if np.any(f < 0):
        raise OperatorDomainError("输入必须非负")
    h = (upper - lower) / f.size
    if points is None:
        return toeplitz_operator(f.size, h, alpha) @ f
    edges = lower + h * np.arange(f.size + 1)
    return cell_weights(edges, np.atleast_1d(points), alpha) @ f


def product_fractional_integral(f: GridFunction, alpha: float, beta: float,
                                order: str = "xy") -> GridFunction:
    """
    乘积分数次积分的迭代实现：先对每个 y 切片做 x 方向积分，再对每个 x 切片做 y 方向积分

    order="yx" 时顺序相反，结果一致（有限和的 Fubini）。
    """
    if np.any(f.values < 0):
        raise OperatorDomainError("输入必须非负")
    n1, n2 = f.resolution
    t1 = toeplitz_operator(n1, f.h1, alpha)
    t2 = toeplitz_operator(n2, f.h2, beta)
    if order == "xy":
        out = (t1 @ f.values) @ t2.T
    elif order == "yx":
        out = t1 @ (f.values @ t2.T)
    else:
        raise OperatorDomainError(f"未知迭代顺序: {order}")
    logger.debug(f"乘积分数次积分: 网格 {n1}x{n2}, alpha={alpha}, beta={beta}, order={order}")
    return f.with_values(out)


def product_fractional_integral_at(f: GridFunction, alpha: float, beta: float,
                                   points: np.ndarray) -> np.ndarray:
    """在任意点 (x, y) 处评估 I_{α,β} f（单元精确权）"""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise DimensionMismatchError("网格路径只支持 m = n = 1")
    a1, b1, a2, b2 = f.box
    edges1 = a1 + f.h1 * np.arange(f.resolution[0] + 1)
    edges2 = a2 + f.h2 * np.arange(f.resolution[1] + 1)
    w1 = cell_weights(edges1, pts[:, 0], alpha)
    w2 = cell_weights(edges2, pts[:, 1], beta)
    return np.einsum("pi,ij,pj->p", w1, f.values, w2)


def product_fractional_integral_atomic(mu: Atomic, alpha: float, beta: float,
                                       points: np.ndarray, m: int = 1, n: int = 1) -> np.ndarray:
    """I_{α,β} μ(x,y) = Σ c_i |x−x_i|^{α−m}|y−y_i|^{β−n}（原子测度精确求和）"""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mu.dim != m + n or pts.shape[1] != m + n:
        raise DimensionMismatchError(f"维数不一致: 测度 {mu.dim}, 点 {pts.shape[1]}, m+n = {m + n}")
    if mu.points.shape[0] == 0:
        return np.zeros(pts.shape[0])
    kernel = product_kernel(pts[:, None, :m], pts[:, None, m:], mu.points[None, :, :m],
                            mu.points[None, :, m:], alpha, beta, m, n)
    return kernel @ mu.masses


# ============================================================
# 二进极大函数
# ============================================================

@dataclass(frozen=True)
class DyadicConfig:
    """
    二进代数范围：边长 2^k，k_min ≤ k ≤ k_max，立方体 [origin + j·2^k, origin + (j+1)·2^k)
    """
    k_min: int = -20
    k_max: int = 20
    origin: float = 0.0

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise OperatorDomainError(f"空的二进代数范围: [{self.k_min}, {self.k_max}]")

    @property
    def generations(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def sides(self) -> np.ndarray:
        return 2.0 ** self.generations.astype(float)

    def cube_index(self, coords: np.ndarray) -> np.ndarray:
        """
        coords 形状 (K, d) → 索引形状 (K, G, d)

        索引保持为浮点整数，远离原点的坐标不会溢出。
        """
        c = np.atleast_2d(np.asarray(coords, dtype=float)) - self.origin
        return np.floor(c[:, None, :] / self.sides()[None, :, None])


def _same_cube(cfg: DyadicConfig, points: np.ndarray, atoms: np.ndarray) -> np.ndarray:
    """same[p, g, a]: 点 p 与原子 a 在第 g 代落在同一个二进立方体"""
    ip = cfg.cube_index(points)
    ia = cfg.cube_index(atoms)
    return np.all(ip[:, :, None, :] == np.transpose(ia, (1, 0, 2))[None, :, :, :], axis=3)


def dyadic_fractional_maximal_1d(mu: Atomic, alpha: float, cfg: DyadicConfig,
                                 eval_points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    M_α^{dy} μ(x) = max_{Q ∋ x} ℓ(Q)^{α−d}·μ(Q)，Q 取遍给定代数范围的二进立方体

    Returns:
        (values, truncated)：truncated 表示取到最大值的立方体位于代数范围的端点
    """
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    d = mu.dim
    if pts.shape[1] != d:
        raise DimensionMismatchError(f"评估点维数 {pts.shape[1]} ≠ 测度维数 {d}")
    if mu.points.shape[0] == 0:
        return np.zeros(pts.shape[0]), np.zeros(pts.shape[0], dtype=bool)

    same = _same_cube(cfg, pts, mu.points)
    mass = same.astype(float) @ mu.masses  # (P, G)
    scale = cfg.sides() ** (float(alpha) - d)
    values = mass * scale[None, :]
    best = np.argmax(values, axis=1)
    top = values[np.arange(pts.shape[0]), best]
    truncated = (top > 0) & ((best == 0) | (best == len(scale) - 1))
    if np.any(truncated):
        logger.warning(f"二进极大函数在代数范围端点取到最大值: {int(truncated.sum())} 个点")
    return top, truncated


def product_dyadic_maximal(mu: Atomic, alpha: float, beta: float,
                           cfg1: DyadicConfig, cfg2: DyadicConfig,
                           eval_points: np.ndarray, m: int = 1,
                           n: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    M_{α,β}^{dy} μ(x,y) = max_{I×J ∋ (x,y)} ℓ(I)^{α−m}ℓ(J)^{β−n}·μ(I×J)

    I、J 分别取遍两个因子的二进立方体；原子上精确计算。
    """
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    if mu.dim != m + n or pts.shape[1] != m + n:
        raise DimensionMismatchError(f"维数不一致: 测度 {mu.dim}, 点 {pts.shape[1]}, m+n = {m + n}")
    if mu.points.shape[0] == 0:
        return np.zeros(pts.shape[0]), np.zeros(pts.shape[0], dtype=bool)

    same1 = _same_cube(cfg1, pts[:, :m], mu.points[:, :m]).astype(float)
    same2 = _same_cube(cfg2, pts[:, m:], mu.points[:, m:]).astype(float)
    mass = np.einsum("pia,pja,a->pij", same1, same2, mu.masses)
    scale = np.outer(cfg1.sides() ** (float(alpha) - m), cfg2.sides() ** (float(beta) - n))
    values = (mass * scale[None, :, :]).reshape(pts.shape[0], -1)

    best = np.argmax(values, axis=1)
    top = values[np.arange(pts.shape[0]), best]
    g1, g2 = np.unravel_index(best, scale.shape)
    truncated = (top > 0) & (
        (g1 == 0) | (g1 == scale.shape[0] - 1) | (g2 == 0) | (g2 == scale.shape[1] - 1)
    )
    if np.any(truncated):
        logger.warning(f"乘积二进极大函数在代数范围端点取到最大值: {int(truncated.sum())} 个点")
    return top, truncated


def weak_type_quotient(maximal_values: np.ndarray, omega: Atomic, q: float,
                       f_norm_p_sigma: float) -> float:
    """
    sup_λ λ·ω({M > λ})^{1/q} / ‖f‖_{L^p(σ)}

    极大值在 ω 的原子上给出；λ 从下方趋近每个取到的值 v，对应 v·ω({M ≥ v})^{1/q}。
    """
    if not f_norm_p_sigma > 0:
        raise OperatorDomainError("f 的范数为零，弱型商无定义")
    values = np.asarray(maximal_values, dtype=float)
    if values.shape[0] != omega.masses.shape[0]:
        raise DimensionMismatchError("极大值个数与 ω 的原子数不一致")
    if values.size == 0:
        return 0.0
    order = np.argsort(-values, kind="stable")
    sorted_vals = values[order]
    cumulative = np.cumsum(omega.masses[order])
    # 相同取值的原子一起计入 {M ≥ v}
    last_of_value = np.r_[sorted_vals[1:] != sorted_vals[:-1], True]
    candidates = sorted_vals[last_of_value] * cumulative[last_of_value] ** (1.0 / float(q))
    return float(np.max(candidates) / f_norm_p_sigma)


def dyadic_characteristic_1param(sigma: Atomic, omega: Atomic, alpha: float, p: float,
                                 q: float, cfg: DyadicConfig) -> float:
    """
    A_{p,q}^{α,dy}(σ, ω) = max_Q ℓ(Q)^{α−d}·ω(Q)^{1/q}·σ(Q)^{1/p′}

    Q 只需取遍同时含有 σ 与 ω 原子的二进立方体。
    """
    if sigma.dim != omega.dim:
        raise DimensionMismatchError("σ 与 ω 的维数不一致")
    if sigma.points.shape[0] == 0 or omega.points.shape[0] == 0:
        return 0.0
    d = sigma.dim
    p_prime = p / (p - 1)
    best = 0.0
    for k in cfg.generations:
        side = 2.0 ** float(k)
        keys_s = np.floor((sigma.points - cfg.origin) / side)
        keys_w = np.floor((omega.points - cfg.origin) / side)
        cubes_s, inv_s = np.unique(keys_s, axis=0, return_inverse=True)
        mass_s = np.bincount(inv_s.reshape(-1), weights=sigma.masses, minlength=len(cubes_s))
        lookup = {tuple(c): mass_s[i] for i, c in enumerate(cubes_s)}
        cubes_w, inv_w = np.unique(keys_w, axis=0, return_inverse=True)
        mass_w = np.bincount(inv_w.reshape(-1), weights=omega.masses, minlength=len(cubes_w))
        for i, c in enumerate(cubes_w):
            ms = lookup.get(tuple(c))
            if ms:
                value = side ** (alpha - d) * mass_w[i] ** (1 / q) * ms ** (1 / p_prime)
                best = max(best, value)
    return best


# ============================================================
# 双线性下界
# ============================================================

Side = Union[GridFunction, Atomic]


@dataclass(frozen=True, eq=False)
class TestPair:
    """
    检验函数对 (f, h)

    Attributes:
        source: 测度 f·σ（网格密度或原子）
        source_norm: ‖f‖_{L^p(σ)}
        target: 测度 h·ω（网格密度或原子）
        target_norm: ‖h‖_{L^{q′}(ω)}
    """
    __test__ = False  # pytest: not a test class

    source: Side
    source_norm: float
    target: Side
    target_norm: float


def _target_points(target: Side) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(target, Atomic):
        return target.points, target.masses
    xx, yy = np.meshgrid(target.midpoints1, target.midpoints2, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return pts, target.values.ravel() * target.cell_area


def bilinear_form(pair: TestPair, alpha: float, beta: float) -> float:
    """∫ I_{α,β}(f σ) h dω（m = n = 1）"""
    pts, masses = _target_points(pair.target)
    live = masses > 0
    if not np.any(live):
        return 0.0
    if isinstance(pair.source, Atomic):
        values = product_fractional_integral_atomic(pair.source, alpha, beta, pts[live])
    else:
        values = product_fractional_integral_at(pair.source, alpha, beta, pts[live])
    return float(np.sum(values * masses[live]))


def norm_lower_bound(pairs: Sequence[TestPair], alpha: float, beta: float) -> float:
    """
    N_{p,q} ≥ max_{(f,h)} ∫ I(fσ) h dω / (‖f‖_{L^p(σ)}·‖h‖_{L^{q′}(ω)})

    零范数的检验对跳过；空族返回 0。
    """
    best = 0.0
    for pair in pairs:
        if not (pair.source_norm > 0 and pair.target_norm > 0):
            logger.debug("跳过零范数检验对")
            continue
        quotient = bilinear_form(pair, alpha, beta) / (pair.source_norm * pair.target_norm)
        best = max(best, quotient)
    return best


def tail_test_pair(R: Rectangle, alpha: float, beta: float, p: float, q: float,
                   sigma: GridFunction, omega: GridFunction) -> TestPair:
    """
    尾函数检验对：f = ŝ^{p′−1}、h = ŝ^{q−1}，限制在网格盒子上

    由核下界 |x−u|^{α−1}|y−t|^{β−1} ≥ s^{α−1}t^{β−1}ŝ(x,y)ŝ(u,t)，
    该检验对的商不小于网格上的两尾局部特征量。
    """
    tf = TailFunction(R, alpha, beta, 1, 1)
    p_prime = p / (p - 1)
    q_prime = q / (q - 1)

    def tails(grid: GridFunction) -> np.ndarray:
        xx, yy = np.meshgrid(grid.midpoints1, grid.midpoints2, indexing="ij")
        return tf.values(np.stack([xx.ravel(), yy.ravel()], axis=1)).reshape(grid.resolution)

    s_sigma = tails(sigma)
    s_omega = tails(omega)
    f = s_sigma ** (p_prime - 1)
    h = s_omega ** (q - 1)
    source_norm = float(np.sum(f ** p * sigma.values) * sigma.cell_area) ** (1 / p)
    target_norm = float(np.sum(h ** q_prime * omega.values) * omega.cell_area) ** (1 / q_prime)
    return TestPair(
        source=sigma.with_values(f * sigma.values),
        source_norm=source_norm,
        target=omega.with_values(h * omega.values),
        target_norm=target_norm,
    )


def dirac_extremal_pair(omega: Atomic, alpha: float, beta: float, q: float,
                        m: int = 1, n: int = 1) -> TestPair:
    """
    σ = δ_0 时的极值检验对：f(0) = 1，h = K^{q−1}，K = |x|^{α−m}|y|^{β−n}

    商恰好等于 (Σ K^q c_i)^{1/q}。
    """
    if omega.dim != m + n:
        raise DimensionMismatchError(f"ω 维数 {omega.dim} ≠ m+n = {m + n}")
    origin = Atomic(np.zeros((1, m + n)), np.ones(1))
    kernel = product_fractional_integral_atomic(origin, alpha, beta, omega.points, m, n)
    if not np.all(np.isfinite(kernel)):
        raise OperatorDomainError("ω 在坐标超平面上有原子，Dirac 检验对发散")
    q_prime = q / (q - 1)
    h = kernel ** (q - 1)
    keep = h > 0
    target = Atomic(omega.points[keep], (h * omega.masses)[keep])
    target_norm = float(np.sum(h ** q_prime * omega.masses)) ** (1 / q_prime)
    return TestPair(source=origin, source_norm=1.0, target=target, target_norm=target_norm)
