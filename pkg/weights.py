#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
权重与测度模块

符号化的权重（幂权、乘积幂权、平移幂权、常数、乘积、表格）与测度（原子、密度、乘积、
原点 Dirac 质量），以及它们在矩形 I×J 上的质量计算。

质量计算策略：
1. 原子测度：半开立方体 [c−s/2, c+s/2)^m 上的精确求和
2. 可分离密度：一维精确原函数，因子积分相乘
3. 径向幂密度：原点锚定矩形用无衬线闭式比较值，平面矩形用极坐标精确积分，
   其余情形使用中点法则加奇异单元闭式修正或张量 Gauss–Legendre
4. 不可积奇点返回 +∞（发散是信息而不是错误）
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from indices import parse_real

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class DimensionMismatchError(ValueError):
    """点或矩形的维数与权重/测度不匹配"""


class WeightSpecError(ValueError):
    """权重或测度描述无效"""


# ============================================================
# 矩形与网格函数
# ============================================================

@dataclass(frozen=True)
class Rectangle:
    """
    乘积立方体 I×J

    Attributes:
        center1: I 的中心（R^m 中的点）
        center2: J 的中心（R^n 中的点）；单参数立方体时为空元组
        s: I 的边长
        t: J 的边长（单参数立方体时取 1）
    """
    center1: Tuple[float, ...]
    center2: Tuple[float, ...]
    s: float
    t: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center1", tuple(float(c) for c in self.center1))
        object.__setattr__(self, "center2", tuple(float(c) for c in self.center2))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "t", float(self.t))
        if not self.center1:
            raise DimensionMismatchError("center1 不能为空")
        for side in (self.s, self.t):
            if not (side > 0 and math.isfinite(side)):
                raise WeightSpecError(f"边长必须为正有限数: {side}")

    @property
    def m(self) -> int:
        return len(self.center1)

    @property
    def n(self) -> int:
        return len(self.center2)

    @property
    def volume(self) -> float:
        """|I×J| = s^m·t^n"""
        return self.s ** self.m * self.t ** self.n

    @property
    def lower(self) -> np.ndarray:
        return np.array(
            [c - self.s / 2 for c in self.center1] + [c - self.t / 2 for c in self.center2]
        )

    @property
    def upper(self) -> np.ndarray:
        return np.array(
            [c + self.s / 2 for c in self.center1] + [c + self.t / 2 for c in self.center2]
        )

    def contains(self, points: np.ndarray) -> np.ndarray:
        """半开立方体成员判定，points 形状 (K, m+n)"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.m + self.n:
            raise DimensionMismatchError(
                f"点维数 {pts.shape[1]} 与矩形维数 {self.m + self.n} 不一致"
            )
        return np.all((pts >= self.lower) & (pts < self.upper), axis=1)

    def closure_contains_origin(self) -> bool:
        return bool(np.all(self.lower <= 0) and np.all(self.upper >= 0))

    def is_origin_centered(self) -> bool:
        return all(c == 0 for c in self.center1 + self.center2)

    def is_origin_cornered(self) -> bool:
        return all(c == self.s / 2 for c in self.center1) and all(c == self.t / 2 for c in self.center2)

    def dilate(self, k1: float, k2: float = 0) -> "Rectangle":
        """同心放大：边长乘以 2^{k1}、2^{k2}"""
        return replace(self, s=self.s * 2.0 ** k1, t=self.t * 2.0 ** k2)

    def first_factor(self) -> "Rectangle":
        return Rectangle(self.center1, (), self.s, 1.0)

    def second_factor(self) -> "Rectangle":
        if not self.center2:
            raise DimensionMismatchError("单参数立方体没有第二个因子")
        return Rectangle(self.center2, (), self.t, 1.0)

    def sort_key(self) -> Tuple:
        """矩形的全序，用于并行归约时的确定性平局处理"""
        return (self.s, self.t, self.center1, self.center2)

    @classmethod
    def centered(cls, m: int, n: int, s: float, t: float = 1.0) -> "Rectangle":
        return cls((0.0,) * m, (0.0,) * n, s, t)

    @classmethod
    def cornered(cls, m: int, n: int, s: float, t: float = 1.0) -> "Rectangle":
        return cls((s / 2,) * m, (t / 2,) * n, s, t)

    @classmethod
    def from_bounds(cls, a1: float, b1: float, a2: float, b2: float) -> "Rectangle":
        """由 [a1,b1)×[a2,b2) 构造（仅当两边等长时为立方体积）"""
        return cls(((a1 + b1) / 2,), ((a2 + b2) / 2,), b1 - a1, b2 - a2)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    二维盒子 [a1,b1]×[a2,b2] 上的非负网格函数，values[i, j] 为单元中点处的值

    仅用于 m = n = 1 的算子流水线。
    """
    box: Tuple[float, float, float, float]
    values: np.ndarray

    def __post_init__(self):
        box = tuple(float(b) for b in self.box)
        if len(box) != 4 or not (box[0] < box[1] and box[2] < box[3]):
            raise WeightSpecError(f"无效的盒子: {self.box}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or min(values.shape) < 1:
            raise WeightSpecError(f"网格值必须是非空二维数组，实际形状 {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise WeightSpecError("网格值必须非负且有限")
        values.setflags(write=False)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "values", values)

    @property
    def resolution(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def h1(self) -> float:
        return (self.box[1] - self.box[0]) / self.values.shape[0]

    @property
    def h2(self) -> float:
        return (self.box[3] - self.box[2]) / self.values.shape[1]

    @property
    def cell_area(self) -> float:
        return self.h1 * self.h2

    @property
    def midpoints1(self) -> np.ndarray:
        return self.box[0] + self.h1 * (np.arange(self.values.shape[0]) + 0.5)

    @property
    def midpoints2(self) -> np.ndarray:
        return self.box[2] + self.h2 * (np.arange(self.values.shape[1]) + 0.5)

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_area)

    def shifted(self, dx: float, dy: float) -> "GridFunction":
        a1, b1, a2, b2 = self.box
        return GridFunction((a1 + dx, b1 + dx, a2 + dy, b2 + dy), self.values)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.box, values)

    @classmethod
    def from_function(cls, box: Sequence[float], resolution: Tuple[int, int], func) -> "GridFunction":
        """在单元中点处采样 func(x, y)（向量化）"""
        a1, b1, a2, b2 = (float(b) for b in box)
        n1, n2 = resolution
        x = a1 + (b1 - a1) / n1 * (np.arange(n1) + 0.5)
        y = a2 + (b2 - a2) / n2 * (np.arange(n2) + 0.5)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        return cls((a1, b1, a2, b2), np.asarray(func(xx, yy), dtype=float))


@dataclass(frozen=True)
class QuadratureConfig:
    """
    求积配置

    Attributes:
        cells: 每轴中点单元数（二维基准；高维按总预算 cells² 分摊）
        rel_tol: 自适应加倍的相对收敛阈值
        max_doublings: 最多加倍次数
        prefer_closed_form: 原点锚定矩形上的幂密度使用无衬线闭式比较值
        gauss_order: 张量 Gauss–Legendre 每轴节点数
    """
    cells: int = 256
    rel_tol: float = 1e-4
    max_doublings: int = 3
    prefer_closed_form: bool = True
    gauss_order: int = 8


# ============================================================
# 权重
# ============================================================

def _as_exponent(value: Any) -> float:
    return float(parse_real(value))


def _norm(points: np.ndarray) -> np.ndarray:
    if points.shape[1] == 0:
        return np.zeros(points.shape[0])
    return np.sqrt(np.sum(points * points, axis=1))


def _safe_power(base: np.ndarray, e: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.power(base, e)


class WeightSpec:
    """权重基类：非负函数 w(x, y)"""

    kind: str = "weight"

    def value_at(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def power(self, r: float) -> "WeightSpec":
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    def evaluate(self, point: Sequence[float], m: int, n: int) -> float:
        """在单点 (x, y) ∈ R^{m+n} 处求值"""
        pt = np.asarray(point, dtype=float).reshape(-1)
        if pt.size != m + n:
            raise DimensionMismatchError(f"点维数 {pt.size} ≠ m+n = {m + n}")
        return float(self.value_at(pt[None, :m], pt[None, m:])[0])


@dataclass(frozen=True)
class RadialPower(WeightSpec):
    """|(x,y)|^e"""
    exponent: float
    kind = "radial_power"

    def __post_init__(self):
        object.__setattr__(self, "exponent", float(self.exponent))

    def value_at(self, x, y):
        pts = np.hstack([np.atleast_2d(x), np.atleast_2d(y)]) if np.size(y) else np.atleast_2d(x)
        return _safe_power(_norm(pts), self.exponent)

    def power(self, r):
        return RadialPower(self.exponent * float(r))

    def to_dict(self):
        return {"kind": self.kind, "exponent": self.exponent}


@dataclass(frozen=True)
class ProductPower(WeightSpec):
    """|x|^{e1}·|y|^{e2}"""
    e1: float
    e2: float
    kind = "product_power"

    def __post_init__(self):
        object.__setattr__(self, "e1", float(self.e1))
        object.__setattr__(self, "e2", float(self.e2))

    def value_at(self, x, y):
        if np.size(y) == 0:
            raise DimensionMismatchError("product_power 需要两个因子变量")
        left = _safe_power(_norm(np.atleast_2d(x)), self.e1)
        right = _safe_power(_norm(np.atleast_2d(y)), self.e2)
        return _product_values(left, right)

    def power(self, r):
        return ProductPower(self.e1 * float(r), self.e2 * float(r))

    def to_dict(self):
        return {"kind": self.kind, "e1": self.e1, "e2": self.e2}


@dataclass(frozen=True)
class ShiftedPower(WeightSpec):
    """
    (1+|x|)^e 作用在第 factor 个因子变量上

    作为 Product 的子权重时只接收自身因子的变量，此时 factor 不起作用。
    """
    exponent: float
    factor: int = 1
    kind = "shifted_power"

    def __post_init__(self):
        object.__setattr__(self, "exponent", float(self.exponent))
        if self.factor not in (1, 2):
            raise WeightSpecError(f"factor 必须为 1 或 2: {self.factor}")

    def value_at(self, x, y):
        var = np.atleast_2d(y) if (self.factor == 2 and np.size(y)) else np.atleast_2d(x)
        return np.power(1.0 + _norm(var), self.exponent)

    def power(self, r):
        return ShiftedPower(self.exponent * float(r), self.factor)

    def to_dict(self):
        return {"kind": self.kind, "exponent": self.exponent, "factor": self.factor}


@dataclass(frozen=True)
class Constant(WeightSpec):
    c: float = 1.0
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        if not (self.c > 0 and math.isfinite(self.c)):
            raise WeightSpecError(f"常数权重必须为正: {self.c}")

    def value_at(self, x, y):
        return np.full(np.atleast_2d(x).shape[0], self.c)

    def power(self, r):
        return Constant(self.c ** float(r))

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Product(WeightSpec):
    """w1(x)·w2(y)，left 定义在 R^m 上，right 定义在 R^n 上"""
    left: WeightSpec
    right: WeightSpec
    kind = "product"

    def __post_init__(self):
        for part in (self.left, self.right):
            if isinstance(part, (Product, ProductPower, Tabulated)):
                raise WeightSpecError(f"{part.kind} 不能作为乘积权重的因子")

    def value_at(self, x, y):
        if np.size(y) == 0:
            raise DimensionMismatchError("product 需要两个因子变量")
        x2, y2 = np.atleast_2d(x), np.atleast_2d(y)
        empty = np.zeros((x2.shape[0], 0))
        return _product_values(self.left.value_at(x2, empty), self.right.value_at(y2, empty))

    def power(self, r):
        return Product(self.left.power(r), self.right.power(r))

    def to_dict(self):
        return {"kind": self.kind, "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass(frozen=True, eq=False)
class Tabulated(WeightSpec):
    """网格上的分片常数权重（盒子外为 0），可带幂次"""
    grid: GridFunction
    exponent: float = 1.0
    kind = "tabulated"

    def value_at(self, x, y):
        x2, y2 = np.atleast_2d(x), np.atleast_2d(y)
        if x2.shape[1] != 1 or y2.shape[1] != 1:
            raise DimensionMismatchError("tabulated 权重仅支持 m = n = 1")
        a1, b1, a2, b2 = self.grid.box
        i = np.floor((x2[:, 0] - a1) / self.grid.h1).astype(int)
        j = np.floor((y2[:, 0] - a2) / self.grid.h2).astype(int)
        n1, n2 = self.grid.resolution
        inside = (i >= 0) & (i < n1) & (j >= 0) & (j < n2)
        out = np.zeros(x2.shape[0])
        out[inside] = _safe_power(self.grid.values[i[inside], j[inside]], self.exponent)
        return out

    def power(self, r):
        return Tabulated(self.grid, self.exponent * float(r))

    def to_dict(self):
        return {
            "kind": self.kind,
            "box": list(self.grid.box),
            "values": self.grid.values.tolist(),
            "exponent": self.exponent,
        }


def _product_values(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        out = left * right
    # 0·∞ 只出现在零测集上，按 +∞ 处理
    return np.where(np.isnan(out), np.inf, out)


def evaluate(w: WeightSpec, point: Sequence[float], m: int, n: int) -> float:
    return w.evaluate(point, m, n)


# ============================================================
# 测度
# ============================================================

class MeasureSpec:
    kind: str = "measure"

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Atomic(MeasureSpec):
    """有限个正质量原子 Σ c_i δ_{P_i}"""
    points: np.ndarray
    masses: np.ndarray
    kind = "atomic"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
        masses = np.array(self.masses, dtype=float).reshape(-1)
        if pts.shape[0] != masses.shape[0]:
            raise WeightSpecError("原子点数与质量数不一致")
        if not np.all(np.isfinite(pts)):
            raise WeightSpecError("原子点必须有限")
        if not np.all(np.isfinite(masses)) or np.any(masses <= 0):
            raise WeightSpecError("原子质量必须为正有限数")
        pts.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[Sequence[float], float]], dim: Optional[int] = None) -> "Atomic":
        atoms = list(atoms)
        if not atoms:
            return cls(np.zeros((0, dim or 2)), np.zeros(0))
        return cls(np.array([list(p) for p, _ in atoms], dtype=float), np.array([c for _, c in atoms]))

    def to_dict(self):
        return {
            "kind": self.kind,
            "atoms": [[pt.tolist(), float(c)] for pt, c in zip(self.points, self.masses)],
        }


@dataclass(frozen=True)
class Density(MeasureSpec):
    """dμ = w^power dxdy"""
    weight: WeightSpec
    power: float = 1.0
    kind = "density"

    def __post_init__(self):
        object.__setattr__(self, "power", float(self.power))

    def to_dict(self):
        return {"kind": self.kind, "weight": self.weight.to_dict(), "power": self.power}


@dataclass(frozen=True)
class ProductMeasure(MeasureSpec):
    """μ1 × μ2，μ1 在 R^m 上，μ2 在 R^n 上"""
    mu1: MeasureSpec
    mu2: MeasureSpec
    kind = "product_measure"

    def to_dict(self):
        return {"kind": self.kind, "mu1": self.mu1.to_dict(), "mu2": self.mu2.to_dict()}


@dataclass(frozen=True)
class DiracOrigin(MeasureSpec):
    """原点处的单位质量"""
    kind = "dirac_origin"

    def to_dict(self):
        return {"kind": self.kind}


def lebesgue() -> Density:
    return Density(Constant(1.0), 1.0)


# ============================================================
# 一维精确积分
# ============================================================

def _abs_power_integral(a: float, b: float, e: float) -> float:
    """∫_a^b |x|^e dx"""
    if b <= a:
        return 0.0
    if e == 0:
        return b - a
    if a <= 0 <= b:
        if e <= -1:
            return math.inf
        g = lambda x: math.copysign(abs(x) ** (e + 1), x) / (e + 1)
        return g(b) - g(a)
    lo, hi = (a, b) if a > 0 else (-b, -a)
    if e == -1:
        return math.log(hi / lo)
    return (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)


def _shifted_power_integral(a: float, b: float, e: float) -> float:
    """∫_a^b (1+|x|)^e dx，奇原函数跨越原点同样成立"""
    if b <= a:
        return 0.0
    if e == -1:
        h = lambda x: math.copysign(math.log1p(abs(x)), x)
    else:
        h = lambda x: math.copysign(((1 + abs(x)) ** (e + 1) - 1) / (e + 1), x)
    return h(b) - h(a)


def _ball_power_integral(d: int, e: float, r: float) -> float:
    """∫_{|z|<r} |z|^e dz = ω_{d−1} r^{d+e}/(d+e)"""
    if d + e <= 0:
        return math.inf
    surface = 2 * math.pi ** (d / 2) / special.gamma(d / 2)
    return surface * r ** (d + e) / (d + e)


# ============================================================
# 多维求积
# ============================================================

def _tensor_gauss(func, lower: np.ndarray, upper: np.ndarray, order: int, splits: int = 1) -> float:
    """盒子上的张量 Gauss–Legendre 求积，func 接收 (K, d) 点阵"""
    d = lower.size
    nodes, wts = leggauss(order)
    axes_pts, axes_wts = [], []
    for i in range(d):
        edges = np.linspace(lower[i], upper[i], splits + 1)
        half = np.diff(edges) / 2
        mid = (edges[:-1] + edges[1:]) / 2
        axes_pts.append((mid[:, None] + half[:, None] * nodes[None, :]).ravel())
        axes_wts.append((half[:, None] * wts[None, :]).ravel())
    grids = np.meshgrid(*axes_pts, indexing="ij")
    weights = np.ones_like(grids[0])
    for i, w in enumerate(np.meshgrid(*axes_wts, indexing="ij")):
        weights = weights * w
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return float(np.sum(func(pts) * weights.ravel()))


def _axis_cells(d: int, cells: int) -> int:
    if d <= 2:
        return cells
    return max(2, int(round((cells ** 2) ** (1.0 / d))))


def _midpoint_corner(e: float, lower: np.ndarray, upper: np.ndarray, per_axis: int) -> float:
    """
    原点位于角点的盒子上 ∫|z|^e：中点法则，原点所在角单元以等体积球扇区闭式代替
    """
    d = lower.size
    h = (upper - lower) / per_axis
    axes = [lower[i] + h[i] * (np.arange(per_axis) + 0.5) for i in range(d)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = _safe_power(_norm(pts), e)
    cell_volume = float(np.prod(h))

    corner = np.all(np.abs(pts) <= h / 2 + 1e-300, axis=1)
    total = float(np.sum(vals[~corner])) * cell_volume
    if np.any(corner):
        # 角单元 ≈ 2^d 倍体积的球的 1/2^d
        radius = (d * (2 ** d) * cell_volume / (2 * math.pi ** (d / 2) / special.gamma(d / 2))) ** (1.0 / d)
        total += _ball_power_integral(d, e, radius) / 2 ** d
    return total


def _split_at_origin(lower: np.ndarray, upper: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """把包含原点的盒子沿坐标超平面切成以原点为角点的子盒子"""
    pieces = [(lower.copy(), upper.copy())]
    for i in range(lower.size):
        next_pieces = []
        for lo, hi in pieces:
            if lo[i] < 0 < hi[i]:
                left_hi, right_lo = hi.copy(), lo.copy()
                left_hi[i], right_lo[i] = 0.0, 0.0
                next_pieces.extend([(lo, left_hi), (right_lo, hi)])
            else:
                next_pieces.append((lo, hi))
        pieces = next_pieces
    return pieces


def _singular_power_box(e: float, lower: np.ndarray, upper: np.ndarray, quad: QuadratureConfig) -> float:
    """闭包含原点的盒子上 ∫|z|^e，自适应加倍直到相对变化 < rel_tol"""
    d = lower.size
    if d + e <= 0:
        return math.inf
    per_axis = _axis_cells(d, quad.cells)
    pieces = [(lo, hi) for lo, hi in _split_at_origin(lower, upper) if np.all(hi > lo)]

    def estimate(k: int) -> float:
        total = 0.0
        for lo, hi in pieces:
            # 翻转到正象限，使原点成为下角点
            a = np.minimum(np.abs(lo), np.abs(hi))
            b = np.maximum(np.abs(lo), np.abs(hi))
            total += _midpoint_corner(e, a, b, k)
        return total

    previous = estimate(per_axis)
    for _ in range(quad.max_doublings):
        if per_axis * 2 > 4096 or (per_axis * 2) ** d > 4_000_000:
            break
        per_axis *= 2
        current = estimate(per_axis)
        if abs(current - previous) <= quad.rel_tol * abs(current):
            return current
        previous = current
    return previous


def _power_box_mass(e: float, lower: np.ndarray, upper: np.ndarray, quad: QuadratureConfig) -> float:
    """∫_{[lower, upper]} |z|^e dz（任意维）"""
    d = lower.size
    if e == 0:
        return float(np.prod(upper - lower))
    if d == 1:
        return _abs_power_integral(float(lower[0]), float(upper[0]), e)
    touches = bool(np.all(lower <= 0) and np.all(upper >= 0))
    if touches:
        return _singular_power_box(e, lower, upper, quad)
    dist = float(np.linalg.norm(np.maximum(0.0, np.maximum(lower, -upper))))
    diam = float(np.linalg.norm(upper - lower))
    splits = 1 if dist > diam or d > 3 else 4
    return _tensor_gauss(lambda z: _safe_power(_norm(z), e), lower, upper, quad.gauss_order, splits)


def _shifted_box_mass(e: float, lower: np.ndarray, upper: np.ndarray, quad: QuadratureConfig) -> float:
    """∫ (1+|z|)^e dz"""
    if lower.size == 1:
        return _shifted_power_integral(float(lower[0]), float(upper[0]), e)
    total = 0.0
    for lo, hi in _split_at_origin(lower, upper):
        if np.all(hi > lo):
            total += _tensor_gauss(lambda z: np.power(1.0 + _norm(z), e), lo, hi, quad.gauss_order, 2)
    return total


# ============================================================
# 无衬线局部积分（原点锚定比较值）
# ============================================================

def sans_serif_local_integral(m: int, n: int, s: ArrayLike, t: ArrayLike, eta: float) -> ArrayLike:
    """
    𝖨_{(0,0);(s,t)}(η) ≍ ∬_{[0,s]^m×[0,t]^n} (Σx_i + Σy_j)^η

    s ≤ t 时返回 s^{m−(n+η)_−}·t^{(n+η)_+}；t ≤ s 时返回 s^{(m+η)_+}·t^{n−(m+η)_−}。
    对数情形 n+η = 0（或 m+η = 0）的比较值为 s^m·(1/n + ln(t/s))（或 t^n·(1/m + ln(s/t))）。
    m+n+η ≤ 0 时返回 +∞。

    支持数组输入（向量化）。
    """
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    eta = float(eta)
    scalar = s_arr.ndim == 0 and t_arr.ndim == 0
    s_arr, t_arr = np.broadcast_arrays(s_arr, t_arr)

    if m + n + eta <= 0:
        out = np.full(s_arr.shape, np.inf)
        return float(out) if scalar else out

    a = n + eta
    b = m + eta
    with np.errstate(divide="ignore", over="ignore"):
        if abs(a) <= 1e-12:
            tall = s_arr ** m * (1.0 / n + np.log(t_arr / s_arr))
        else:
            tall = s_arr ** (m - max(-a, 0.0)) * t_arr ** max(a, 0.0)
        if abs(b) <= 1e-12:
            wide = t_arr ** n * (1.0 / m + np.log(s_arr / t_arr))
        else:
            wide = s_arr ** max(b, 0.0) * t_arr ** (n - max(-b, 0.0))
    out = np.where(s_arr <= t_arr, tall, wide)
    return float(out) if scalar else out


def brute_force_orthant_integral(s: float, t: float, eta: float) -> float:
    """
    ∬_{[0,s]×[0,t]} (x+y)^η dxdy 的自适应求积（m = n = 1）

    内层对 y 解析积分，外层用 scipy.integrate.quad。
    """
    if eta <= -2:
        return math.inf
    if eta == -1:
        inner = lambda x: math.log1p(t / x) if x > 0 else math.inf
    else:
        inner = lambda x: ((x + t) ** (eta + 1) - x ** (eta + 1)) / (eta + 1)
    value, _ = integrate.quad(inner, 0.0, s, limit=400)
    return float(value)


# ============================================================
# 平面径向幂：极坐标精确积分
# ============================================================

_POLAR_NODES, _POLAR_WEIGHTS = leggauss(32)


def _orthant_radial(a: np.ndarray, b: np.ndarray, e: float) -> np.ndarray:
    """
    F(a, b) = ∫_0^a∫_0^b (x²+y²)^{e/2} dy dx（a, b ≥ 0，要求 e > −2）

    极坐标：对角线角 θ0 = atan2(b, a) 两侧的角向积分均为光滑函数。
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast(a, b).shape)
    a, b = np.broadcast_arrays(a, b)
    live = (a > 0) & (b > 0)
    if not np.any(live):
        return out
    al, bl = a[live], b[live]
    theta0 = np.arctan2(bl, al)
    k = e + 2

    half1 = theta0 / 2
    th1 = half1[:, None] * (_POLAR_NODES[None, :] + 1)
    part1 = np.sum(_POLAR_WEIGHTS[None, :] * (al[:, None] / np.cos(th1)) ** k, axis=1) * half1 / k

    half2 = (np.pi / 2 - theta0) / 2
    th2 = theta0[:, None] + half2[:, None] * (_POLAR_NODES[None, :] + 1)
    part2 = np.sum(_POLAR_WEIGHTS[None, :] * (bl[:, None] / np.sin(th2)) ** k, axis=1) * half2 / k

    out[live] = part1 + part2
    return out


def _planar_radial_masses(e: float, lower: np.ndarray, upper: np.ndarray, quad: QuadratureConfig) -> np.ndarray:
    """
    一批平面矩形上的 ∫|z|^e（lower/upper 形状 (R, 2)）

    近原点的矩形用四个角点的有向象限函数做容斥；远离原点时用张量 Gauss 规则避免相消。
    """
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)
    out = np.empty(lower.shape[0])
    touches = np.all(lower <= 0, axis=1) & np.all(upper >= 0, axis=1)
    dist = np.linalg.norm(np.maximum(0.0, np.maximum(lower, -upper)), axis=1)
    diam = np.linalg.norm(upper - lower, axis=1)
    use_corners = (e > -2) & (dist <= 2 * diam)

    if np.any(touches & (e <= -2)):
        out[touches & (e <= -2)] = math.inf

    idx = np.flatnonzero(use_corners)
    if idx.size:
        def oriented(x, y):
            return np.sign(x) * np.sign(y) * _orthant_radial(np.abs(x), np.abs(y), e)
        x0, y0 = lower[idx, 0], lower[idx, 1]
        x1, y1 = upper[idx, 0], upper[idx, 1]
        out[idx] = oriented(x1, y1) - oriented(x0, y1) - oriented(x1, y0) + oriented(x0, y0)

    rest = np.flatnonzero(~use_corners & ~(touches & (e <= -2)))
    for i in rest:
        splits = 1 if dist[i] > diam[i] else 4
        out[i] = _tensor_gauss(
            lambda z: _safe_power(_norm(z), e), lower[i], upper[i], quad.gauss_order, splits
        )
    return out


# ============================================================
# 矩形质量
# ============================================================

def _mul(a: float, b: float) -> float:
    """测度论约定 0·∞ = 0"""
    if a == 0 or b == 0:
        return 0.0
    return a * b


def _radial_mass(e: float, R: Rectangle, quad: QuadratureConfig) -> float:
    m, n = R.m, R.n
    d = m + n
    if e == 0:
        return R.volume
    if R.closure_contains_origin() and e <= -d:
        return math.inf
    if quad.prefer_closed_form and R.is_origin_cornered():
        return float(sans_serif_local_integral(m, n, R.s, R.t, e))
    if quad.prefer_closed_form and R.is_origin_centered():
        return 2.0 ** d * float(sans_serif_local_integral(m, n, R.s / 2, R.t / 2, e))
    if d == 2:
        return float(_planar_radial_masses(e, R.lower[None, :], R.upper[None, :], quad)[0])
    return _power_box_mass(e, R.lower, R.upper, quad)


def _tabulated_mass(w: Tabulated, r: float, R: Rectangle) -> float:
    """分片常数权重：按单元与矩形的精确重叠面积求和"""
    if R.m != 1 or R.n != 1:
        raise DimensionMismatchError("tabulated 密度仅支持 m = n = 1")
    grid = w.grid
    a1, b1, a2, b2 = grid.box
    edges1 = a1 + grid.h1 * np.arange(grid.resolution[0] + 1)
    edges2 = a2 + grid.h2 * np.arange(grid.resolution[1] + 1)
    lo, hi = R.lower, R.upper
    over1 = np.clip(np.minimum(edges1[1:], hi[0]) - np.maximum(edges1[:-1], lo[0]), 0, None)
    over2 = np.clip(np.minimum(edges2[1:], hi[1]) - np.maximum(edges2[:-1], lo[1]), 0, None)
    vals = _safe_power(grid.values, w.exponent * r)
    vals = np.where(grid.values > 0, vals, 0.0) if w.exponent * r > 0 else vals
    with np.errstate(invalid="ignore"):
        weighted = over1[:, None] * over2[None, :] * vals
    weighted = np.where(np.isnan(weighted), 0.0, weighted)
    return float(np.sum(weighted))


def _density_mass(w: WeightSpec, r: float, R: Rectangle, quad: QuadratureConfig) -> float:
    m, n = R.m, R.n
    if isinstance(w, Constant):
        return w.c ** r * R.volume
    if isinstance(w, Product):
        if n == 0:
            raise WeightSpecError("乘积权重需要两个因子")
        return _mul(
            _density_mass(w.left, r, R.first_factor(), quad),
            _density_mass(w.right, r, R.second_factor(), quad),
        )
    if isinstance(w, ProductPower):
        if n == 0:
            raise WeightSpecError("乘积幂权需要两个因子")
        f1 = R.first_factor()
        f2 = R.second_factor()
        return _mul(
            _power_box_mass(w.e1 * r, f1.lower, f1.upper, quad),
            _power_box_mass(w.e2 * r, f2.lower, f2.upper, quad),
        )
    if isinstance(w, ShiftedPower):
        if n == 0:
            return _shifted_box_mass(w.exponent * r, R.lower, R.upper, quad)
        if w.factor == 1:
            f1 = R.first_factor()
            return _mul(_shifted_box_mass(w.exponent * r, f1.lower, f1.upper, quad), R.t ** n)
        f2 = R.second_factor()
        return _mul(R.s ** m, _shifted_box_mass(w.exponent * r, f2.lower, f2.upper, quad))
    if isinstance(w, RadialPower):
        if n == 0:
            return _power_box_mass(w.exponent * r, R.lower, R.upper, quad)
        return _radial_mass(w.exponent * r, R, quad)
    if isinstance(w, Tabulated):
        return _tabulated_mass(w, r, R)
    raise WeightSpecError(f"未知权重类型: {type(w).__name__}")


def rectangle_mass(mu: MeasureSpec, R: Rectangle, quad: Optional[QuadratureConfig] = None) -> float:
    """
    |R|_μ = μ(I×J)

    Returns:
        非负实数；不可积奇点返回 +∞
    """
    quad = quad or QuadratureConfig()
    if isinstance(mu, Atomic):
        if mu.points.shape[0] == 0:
            return 0.0
        if mu.dim != R.m + R.n:
            raise DimensionMismatchError(f"原子维数 {mu.dim} ≠ 矩形维数 {R.m + R.n}")
        return math.fsum(mu.masses[R.contains(mu.points)])
    if isinstance(mu, DiracOrigin):
        return 1.0 if bool(R.contains(np.zeros((1, R.m + R.n)))[0]) else 0.0
    if isinstance(mu, ProductMeasure):
        if R.n == 0:
            raise DimensionMismatchError("乘积测度需要两个因子的矩形")
        return _mul(
            rectangle_mass(mu.mu1, R.first_factor(), quad),
            rectangle_mass(mu.mu2, R.second_factor(), quad),
        )
    if isinstance(mu, Density):
        return _density_mass(mu.weight, mu.power, R, quad)
    raise WeightSpecError(f"未知测度类型: {type(mu).__name__}")


def factor_mass(mu: MeasureSpec, center: Sequence[float], side: float,
                quad: Optional[QuadratureConfig] = None) -> float:
    """单参数测度在立方体 Q(center, side) ⊂ R^d 上的质量"""
    return rectangle_mass(mu, Rectangle(tuple(center), (), side, 1.0), quad)


def rectangle_masses(mu: MeasureSpec, rects: Sequence[Rectangle],
                     quad: Optional[QuadratureConfig] = None) -> np.ndarray:
    """
    批量矩形质量

    原子测度整体向量化；可分离测度缓存因子质量；平面径向幂密度向量化容斥。
    """
    quad = quad or QuadratureConfig()
    rects = list(rects)
    if not rects:
        return np.zeros(0)

    if isinstance(mu, Atomic):
        if mu.points.shape[0] == 0:
            return np.zeros(len(rects))
        lower = np.array([R.lower for R in rects])
        upper = np.array([R.upper for R in rects])
        if lower.shape[1] != mu.dim:
            raise DimensionMismatchError(f"原子维数 {mu.dim} ≠ 矩形维数 {lower.shape[1]}")
        out = np.empty(len(rects))
        chunk = max(1, 2_000_000 // max(1, mu.points.shape[0] * mu.dim))
        for start in range(0, len(rects), chunk):
            lo = lower[start:start + chunk, None, :]
            hi = upper[start:start + chunk, None, :]
            mask = np.all((mu.points[None, :, :] >= lo) & (mu.points[None, :, :] < hi), axis=2)
            out[start:start + chunk] = mask.astype(float) @ mu.masses
        return out

    if isinstance(mu, ProductMeasure) or (
        isinstance(mu, Density) and isinstance(mu.weight, (Product, ProductPower, ShiftedPower))
        and rects[0].n > 0
    ):
        first, second = _separable_factors(mu)
        cache1: Dict[Tuple, float] = {}
        cache2: Dict[Tuple, float] = {}
        out = np.empty(len(rects))
        for i, R in enumerate(rects):
            k1 = (R.center1, R.s)
            k2 = (R.center2, R.t)
            if k1 not in cache1:
                cache1[k1] = rectangle_mass(first, R.first_factor(), quad)
            if k2 not in cache2:
                cache2[k2] = rectangle_mass(second, R.second_factor(), quad)
            out[i] = _mul(cache1[k1], cache2[k2])
        return out

    if (isinstance(mu, Density) and isinstance(mu.weight, RadialPower)
            and rects[0].m == 1 and rects[0].n == 1):
        e = mu.weight.exponent * mu.power
        out = np.empty(len(rects))
        generic = []
        for i, R in enumerate(rects):
            if e == 0:
                out[i] = R.volume
            elif quad.prefer_closed_form and (R.is_origin_cornered() or R.is_origin_centered()):
                out[i] = _radial_mass(e, R, quad)
            else:
                generic.append(i)
        if generic:
            lower = np.array([rects[i].lower for i in generic])
            upper = np.array([rects[i].upper for i in generic])
            out[generic] = _planar_radial_masses(e, lower, upper, quad)
        return out

    return np.array([rectangle_mass(mu, R, quad) for R in rects])


def _separable_factors(mu: MeasureSpec) -> Tuple[MeasureSpec, MeasureSpec]:
    """把可分离测度拆成两个单参数因子测度"""
    if isinstance(mu, ProductMeasure):
        return mu.mu1, mu.mu2
    assert isinstance(mu, Density)
    w, r = mu.weight, mu.power
    if isinstance(w, Product):
        return Density(w.left, r), Density(w.right, r)
    if isinstance(w, ProductPower):
        return Density(RadialPower(w.e1), r), Density(RadialPower(w.e2), r)
    if isinstance(w, ShiftedPower):
        shifted = Density(ShiftedPower(w.exponent), r)
        return (shifted, lebesgue()) if w.factor == 1 else (lebesgue(), shifted)
    raise WeightSpecError(f"{w.kind} 不可分离")


def is_separable(mu: MeasureSpec) -> bool:
    if isinstance(mu, ProductMeasure):
        return True
    return isinstance(mu, Density) and isinstance(mu.weight, (Constant, Product, ProductPower, ShiftedPower))


def separable_factors(mu: MeasureSpec) -> Tuple[MeasureSpec, MeasureSpec]:
    if isinstance(mu, Density) and isinstance(mu.weight, Constant):
        c = mu.weight.c ** mu.power
        return Density(Constant(c), 1.0), lebesgue()
    return _separable_factors(mu)


# ============================================================
# 放大表
# ============================================================

def minimal_dilation(points: np.ndarray, center: Sequence[float], side: float) -> np.ndarray:
    """
    每个点落入同心放大立方体 2^k·Q（半开）的最小 k ≥ 0

    立方体族关于 k 嵌套，因此成员关系单调。
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.asarray(center, dtype=float)
    d = pts - c[None, :]
    with np.errstate(divide="ignore"):
        # d ≥ 0: 需要 2^{k−1}·side > d；d < 0: 需要 2^{k−1}·side ≥ −d
        ratio = 2 * np.abs(d) / side
        cand = np.where(d >= 0, np.floor(np.log2(ratio)) + 1, np.ceil(np.log2(ratio)))
    cand = np.where(d == 0, 0, cand)
    k = np.max(np.clip(cand, 0, None), axis=1).astype(np.int64) if pts.shape[1] else np.zeros(pts.shape[0], np.int64)

    def inside(kk: np.ndarray) -> np.ndarray:
        h = (2.0 ** kk.astype(float))[:, None] * side / 2
        return np.all((d >= -h) & (d < h), axis=1)

    # log2 取整的浮点修正
    for _ in range(2):
        bump = ~inside(k)
        k = k + bump.astype(np.int64)
        lower_ok = (k > 0) & inside(np.maximum(k - 1, 0))
        k = k - lower_ok.astype(np.int64)
    return k


def _factor_dilation_table(mu: MeasureSpec, center: Tuple[float, ...], side: float,
                           K: int, quad: QuadratureConfig) -> np.ndarray:
    if isinstance(mu, Atomic):
        table = np.zeros(K + 1)
        if mu.points.shape[0]:
            ks = minimal_dilation(mu.points, center, side)
            keep = ks <= K
            np.add.at(table, ks[keep], mu.masses[keep])
        return np.cumsum(table)
    return np.array([factor_mass(mu, center, side * 2.0 ** k, quad) for k in range(K + 1)])


def dilate_mass_table(mu: MeasureSpec, R: Rectangle, K: int,
                      quad: Optional[QuadratureConfig] = None) -> np.ndarray:
    """
    T[k1, k2] = |2^{k1}I × 2^{k2}J|_μ，k1, k2 = 0..K

    原子测度用每个原子的最小放大指数做二维累积直方图；可分离测度取因子表的外积。
    单参数立方体（R.n = 0）返回长度 K+1 的一维表。
    """
    quad = quad or QuadratureConfig()
    if R.n == 0:
        return _factor_dilation_table(mu, R.center1, R.s, K, quad)

    if isinstance(mu, (Atomic, DiracOrigin)):
        atoms = mu if isinstance(mu, Atomic) else Atomic(np.zeros((1, R.m + R.n)), np.ones(1))
        table = np.zeros((K + 1, K + 1))
        if atoms.points.shape[0]:
            if atoms.dim != R.m + R.n:
                raise DimensionMismatchError(f"原子维数 {atoms.dim} ≠ 矩形维数 {R.m + R.n}")
            k1 = minimal_dilation(atoms.points[:, :R.m], R.center1, R.s)
            k2 = minimal_dilation(atoms.points[:, R.m:], R.center2, R.t)
            keep = (k1 <= K) & (k2 <= K)
            np.add.at(table, (k1[keep], k2[keep]), atoms.masses[keep])
        return np.cumsum(np.cumsum(table, axis=0), axis=1)

    if is_separable(mu):
        first, second = separable_factors(mu)
        t1 = _factor_dilation_table(first, R.center1, R.s, K, quad)
        t2 = _factor_dilation_table(second, R.center2, R.t, K, quad)
        with np.errstate(invalid="ignore"):
            out = np.outer(t1, t2)
        return np.where(np.isnan(out), 0.0, out)

    rects = [R.dilate(k1, k2) for k1 in range(K + 1) for k2 in range(K + 1)]
    return rectangle_masses(mu, rects, quad).reshape(K + 1, K + 1)


# ============================================================
# A_1 × A_1 成员判定
# ============================================================

def _a1_factor(w: WeightSpec, d: int) -> Tuple[Optional[bool], Optional[float]]:
    if isinstance(w, Constant):
        return True, 1.0
    if isinstance(w, RadialPower):
        e = w.exponent
        if -d < e <= 0:
            # 原点锚定的立方体给出 d/(d+e)；偏心立方体的比值更大，这里只是下界
            return True, d / (d + e)
        return False, None
    if isinstance(w, ShiftedPower):
        e = w.exponent
        if -d < e <= 0:
            return True, None
        return False, None
    return None, None


def a1_product_membership(w: WeightSpec, m: int, n: int) -> Tuple[Optional[bool], Optional[float]]:
    """
    判定 w 是否属于乘积 A_1 × A_1 类

    Returns:
        (member, constant_lower_bound)：member 为 None 表示不可判定（表格权重、非乘积径向幂等）。
        第二项是 A_1×A_1 常数的下界（各因子下界之积），常数权重时恰为 1；
        偏移幂只能判定成员关系，下界为 None。
    """
    if isinstance(w, Constant):
        return True, 1.0
    if isinstance(w, Product):
        left = _a1_factor(w.left, m)
        right = _a1_factor(w.right, n)
    elif isinstance(w, ProductPower):
        left = _a1_factor(RadialPower(w.e1), m)
        right = _a1_factor(RadialPower(w.e2), n)
    elif isinstance(w, ShiftedPower):
        shifted = _a1_factor(ShiftedPower(w.exponent), m if w.factor == 1 else n)
        left, right = (shifted, (True, 1.0)) if w.factor == 1 else ((True, 1.0), shifted)
    elif isinstance(w, RadialPower) and w.exponent == 0:
        return True, 1.0
    else:
        return None, None

    if left[0] is False or right[0] is False:
        return False, None
    if left[0] is None or right[0] is None:
        return None, None
    bound = left[1] * right[1] if left[1] is not None and right[1] is not None else None
    return True, bound


# ============================================================
# JSON 编解码
# ============================================================

def weight_from_dict(doc: Dict[str, Any]) -> WeightSpec:
    """由 JSON 文档构造权重，例如 {"kind": "radial_power", "exponent": "-1/2"}"""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise WeightSpecError(f"权重描述缺少 kind: {doc!r}")
    kind = doc["kind"]
    try:
        if kind == "radial_power":
            return RadialPower(_as_exponent(doc["exponent"]))
        if kind == "product_power":
            return ProductPower(_as_exponent(doc["e1"]), _as_exponent(doc["e2"]))
        if kind == "shifted_power":
            return ShiftedPower(_as_exponent(doc["exponent"]), int(doc.get("factor", 1)))
        if kind == "constant":
            return Constant(_as_exponent(doc.get("c", 1)))
        if kind == "product":
            return Product(weight_from_dict(doc["left"]), weight_from_dict(doc["right"]))
        if kind == "tabulated":
            grid = GridFunction(tuple(doc["box"]), np.asarray(doc["values"], dtype=float))
            return Tabulated(grid, _as_exponent(doc.get("exponent", 1)))
    except KeyError as e:
        raise WeightSpecError(f"{kind} 缺少字段 {e}") from e
    raise WeightSpecError(f"未知权重类型: {kind!r}")


def measure_from_dict(doc: Dict[str, Any]) -> MeasureSpec:
    """由 JSON 文档构造测度；weight 类文档视为 power = 1 的密度"""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise WeightSpecError(f"测度描述缺少 kind: {doc!r}")
    kind = doc["kind"]
    try:
        if kind == "atomic":
            atoms = doc["atoms"]
            dim = doc.get("dim")
            return Atomic.from_atoms(((pt, float(parse_real(c))) for pt, c in atoms), dim)
        if kind == "density":
            return Density(weight_from_dict(doc["weight"]), _as_exponent(doc.get("power", 1)))
        if kind == "product_measure":
            return ProductMeasure(measure_from_dict(doc["mu1"]), measure_from_dict(doc["mu2"]))
        if kind == "dirac_origin":
            return DiracOrigin()
    except (KeyError, TypeError, ValueError) as e:
        raise WeightSpecError(f"{kind} 描述无效: {e}") from e
    return Density(weight_from_dict(doc), 1.0)


def to_dict(spec: Union[WeightSpec, MeasureSpec]) -> Dict[str, Any]:
    return spec.to_dict()
