#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试算子

验证：
1. Toeplitz 离散算子与单元精确积分
2. 乘积分数次积分两种迭代顺序一致，并与逐单元求积的四重求和一致
3. 单调性、齐次性、核下界与二进极大函数的逐点控制
4. 二进极大函数、弱型商与弱型不等式；远离原点的坐标
5. Dirac 极值检验对的闭式商
"""

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from operators import (
    DyadicConfig,
    OperatorDomainError,
    TailFunction,
    cell_weights,
    dirac_extremal_pair,
    dyadic_characteristic_1param,
    dyadic_fractional_maximal_1d,
    fractional_integral_1d,
    norm_lower_bound,
    product_dyadic_maximal,
    product_fractional_integral,
    product_fractional_integral_at,
    product_fractional_integral_atomic,
    product_kernel,
    tail_test_pair,
    tail_value,
    toeplitz_operator,
    weak_type_quotient,
)
from weights import Atomic, GridFunction, Rectangle


def _bump(x, y):
    r2 = x * x + y * y
    return np.where(r2 < 1, np.exp(-1.0 / np.maximum(1e-300, 1 - r2)), 0.0)


# ============================================================
# 网格路径
# ============================================================

def test_toeplitz_center_cell():
    h, alpha = 0.1, 0.5
    T = toeplitz_operator(4, h, alpha)
    assert T[0, 0] == pytest.approx(2 * (h / 2) ** alpha / alpha)
    np.testing.assert_allclose(T, T.T)


def test_cell_weights_telescoping_outside_support():
    """∫_0^1 |2 − u|^{α−1} du = (2^α − 1)/α"""
    alpha = 0.3
    value = fractional_integral_1d(np.ones(16), 0.0, 1.0, alpha, points=np.array([2.0]))
    assert value[0] == pytest.approx((2 ** alpha - 1) / alpha, rel=1e-12)


def test_grid_and_point_paths_agree_at_midpoints():
    edges = np.linspace(0.0, 1.0, 9)
    mids = 0.5 * (edges[1:] + edges[:-1])
    np.testing.assert_allclose(cell_weights(edges, mids, 0.4), toeplitz_operator(8, 0.125, 0.4), rtol=1e-12)


def test_iteration_orders_agree():
    f = GridFunction.from_function((-1.5, 1.5, -1.5, 1.5), (512, 512), _bump)
    xy = product_fractional_integral(f, 0.5, 0.25, "xy")
    yx = product_fractional_integral(f, 0.5, 0.25, "yx")
    np.testing.assert_allclose(xy.values, yx.values, rtol=1e-9)


def _cell_integral(lo: float, hi: float, x: float, alpha: float) -> float:
    """∫_lo^hi |x − u|^{α−1} du，端点奇性交给 QUADPACK 的代数权"""
    if lo < x < hi:
        return _cell_integral(lo, x, x, alpha) + _cell_integral(x, hi, x, alpha)
    if x == hi:
        return integrate.quad(lambda u: 1.0, lo, hi, weight="alg", wvar=(0.0, alpha - 1))[0]
    if x == lo:
        return integrate.quad(lambda u: 1.0, lo, hi, weight="alg", wvar=(alpha - 1, 0.0))[0]
    return integrate.quad(lambda u: abs(x - u) ** (alpha - 1), lo, hi)[0]


def test_iterated_matches_cellwise_quadrature():
    rng = np.random.default_rng(5)
    f = GridFunction((-1.0, 1.0, 0.0, 1.0), rng.uniform(0.0, 2.0, size=(8, 8)))
    alpha, beta = 0.5, 0.3
    out = product_fractional_integral(f, alpha, beta)

    edges1 = -1.0 + f.h1 * np.arange(9)
    edges2 = f.h2 * np.arange(9)
    c1 = [[_cell_integral(edges1[i], edges1[i + 1], x, alpha) for i in range(8)] for x in f.midpoints1]
    c2 = [[_cell_integral(edges2[j], edges2[j + 1], y, beta) for j in range(8)] for y in f.midpoints2]
    direct = np.zeros((8, 8))
    for a in range(8):
        for b in range(8):
            for i in range(8):
                for j in range(8):
                    direct[a, b] += f.values[i, j] * c1[a][i] * c2[b][j]
    np.testing.assert_allclose(out.values, direct, rtol=1e-6)


def test_indicator_of_unit_square():
    """I_{1/2,1/2} 1_{[0,1]²}：角点处 (∫_0^1 u^{−1/2} du)² = 4，中心处 (2√2)² = 8"""
    f = GridFunction((0.0, 1.0, 0.0, 1.0), np.ones((1024, 1024)))
    values = product_fractional_integral_at(f, 0.5, 0.5, np.array([[0.0, 0.0], [0.5, 0.5]]))
    np.testing.assert_allclose(values, [4.0, 8.0], rtol=1e-10)


def test_monotone_and_homogeneous():
    rng = np.random.default_rng(9)
    box = (-2.0, 2.0, -1.0, 3.0)
    f = GridFunction(box, rng.uniform(0.0, 1.0, size=(32, 24)))
    g = GridFunction(box, f.values + rng.uniform(0.0, 1.0, size=(32, 24)))
    If, Ig = product_fractional_integral(f, 0.4, 0.7), product_fractional_integral(g, 0.4, 0.7)
    assert np.all(If.values <= Ig.values)
    twice = product_fractional_integral(f.with_values(2.0 * f.values), 0.4, 0.7)
    np.testing.assert_allclose(twice.values, 2.0 * If.values, rtol=1e-12)


def test_kernel_dominates_tail_product():
    """|x−u|^{α−1}|y−t|^{β−1} ≥ s^{α−1}t^{β−1}·ŝ(x,y)·ŝ(u,t)"""
    rng = np.random.default_rng(13)
    alpha, beta = 0.3, 0.6
    for _ in range(20):
        s, t = 2.0 ** rng.uniform(-4, 4, size=2)
        R = Rectangle((rng.uniform(-2, 2),), (rng.uniform(-2, 2),), s, t)
        tf = TailFunction(R, alpha, beta)
        xy = rng.uniform(-8, 8, size=(500, 2))
        ut = rng.uniform(-8, 8, size=(500, 2))
        kernel = product_kernel(xy[:, :1], xy[:, 1:], ut[:, :1], ut[:, 1:], alpha, beta)
        bound = s ** (alpha - 1) * t ** (beta - 1) * tf.values(xy) * tf.values(ut)
        assert np.all(kernel >= bound * (1 - 1e-12))


def test_dyadic_maximal_dominated_by_fractional_integral():
    """二进矩形含 (x,y) 与原子时 ℓ(I) > |x−x_i|，因此 M^{dy}μ ≤ I_{α,β}μ"""
    rng = np.random.default_rng(17)
    cfg = DyadicConfig(-10, 10)
    for _ in range(20):
        alpha, beta = rng.uniform(0.1, 0.9, size=2)
        mu = Atomic(rng.uniform(-4, 4, size=(12, 2)), rng.uniform(0.1, 2.0, size=12))
        pts = rng.uniform(-4, 4, size=(200, 2))
        maximal, _ = product_dyadic_maximal(mu, alpha, beta, cfg, cfg, pts)
        integral = product_fractional_integral_atomic(mu, alpha, beta, pts)
        assert np.all(maximal <= integral * (1 + 1e-12))


def test_separable_input_factorizes():
    g = np.linspace(0.1, 1.0, 12)
    h = np.linspace(1.0, 0.2, 10)
    f = GridFunction((0.0, 1.2, 0.0, 1.0), np.outer(g, h))
    out = product_fractional_integral(f, 0.6, 0.4)
    expected = np.outer(fractional_integral_1d(g, 0.0, 1.2, 0.6), fractional_integral_1d(h, 0.0, 1.0, 0.4))
    np.testing.assert_allclose(out.values, expected, rtol=1e-10)


def test_point_evaluation_matches_grid():
    f = GridFunction.from_function((0.0, 1.0, 0.0, 1.0), (16, 16), lambda x, y: 1 + x * y)
    out = product_fractional_integral(f, 0.5, 0.5)
    pts = np.array([[f.midpoints1[3], f.midpoints2[7]], [f.midpoints1[15], f.midpoints2[0]]])
    values = product_fractional_integral_at(f, 0.5, 0.5, pts)
    np.testing.assert_allclose(values, [out.values[3, 7], out.values[15, 0]], rtol=1e-10)


def test_operator_domain_errors():
    f = GridFunction((0.0, 1.0, 0.0, 1.0), np.ones((4, 4)))
    with pytest.raises(OperatorDomainError):
        product_fractional_integral(f, 1.0, 0.5)
    with pytest.raises(OperatorDomainError):
        product_fractional_integral(f, 0.5, 0.5, order="zz")
    with pytest.raises(OperatorDomainError):
        fractional_integral_1d(np.array([1.0, -1.0]), 0.0, 1.0, 0.5)


# ============================================================
# 尾函数
# ============================================================

def test_tail_function():
    tf = TailFunction(Rectangle((0.0,), (0.0,), 1.0, 2.0), 0.5, 0.5)
    assert tail_value(tf, [0.0, 0.0]) == 1.0
    assert tail_value(tf, [1.0, 2.0]) == pytest.approx(2 ** -0.5 * 2 ** -0.5)
    with pytest.raises(OperatorDomainError):
        TailFunction(Rectangle((0.0,), (0.0,), 1.0, 1.0), 1.0, 0.5)


# ============================================================
# 二进极大函数
# ============================================================

def test_dyadic_maximal_one_dimension():
    mu = Atomic(np.array([[0.3]]), np.array([1.0]))
    cfg = DyadicConfig(-3, 3)
    values, truncated = dyadic_fractional_maximal_1d(mu, 0.5, cfg, np.array([[0.7], [0.3]]))
    # 0.7 与 0.3 首次同处于 [0, 1)
    assert values[0] == pytest.approx(1.0)
    assert not truncated[0]
    # 原子所在点的最大值在最细一代取到
    assert values[1] == pytest.approx(2 ** (-3 * -0.5))
    assert truncated[1]


def test_product_dyadic_maximal():
    mu = Atomic(np.array([[0.3, 0.3]]), np.array([2.0]))
    cfg = DyadicConfig(-3, 3)
    values, truncated = product_dyadic_maximal(mu, 0.5, 0.5, cfg, cfg, np.array([[0.7, 0.7], [5.0, 0.3]]))
    assert values[0] == pytest.approx(2.0)
    assert not truncated[0]
    # x 方向首次同处于 [0, 8)，y 方向在最细一代
    assert values[1] == pytest.approx(2.0 * 8 ** -0.5 * 2 ** 1.5)


def test_weak_type_quotient_uses_left_limits():
    omega = Atomic(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 1.0, 7.0]))
    quotient = weak_type_quotient(np.array([2.0, 1.0, 1.0]), omega, 2.0, 1.0)
    # max(2·1^{1/2}, 1·9^{1/2})
    assert quotient == pytest.approx(3.0)
    with pytest.raises(OperatorDomainError):
        weak_type_quotient(np.array([1.0, 1.0, 1.0]), omega, 2.0, 0.0)


def test_dyadic_characteristic_one_parameter():
    sigma = Atomic(np.array([[0.3]]), np.array([1.0]))
    omega = Atomic(np.array([[0.7]]), np.array([1.0]))
    assert dyadic_characteristic_1param(sigma, omega, 0.5, 2.0, 2.0, DyadicConfig(-3, 3)) == pytest.approx(1.0)


def test_dyadic_cubes_far_from_origin():
    """2^70 与 2^71 落在不同的单位二进区间，索引不能溢出成同一个"""
    cfg = DyadicConfig(0, 0)
    mu = Atomic(np.array([[2.0 ** 70], [2.0 ** 71]]), np.array([1.0, 1.0]))
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        values, _ = dyadic_fractional_maximal_1d(mu, 0.5, cfg, np.array([[2.0 ** 70]]))
        apart = dyadic_characteristic_1param(
            Atomic(np.array([[2.0 ** 70]]), np.array([1.0])),
            Atomic(np.array([[2.0 ** 71]]), np.array([1.0])), 0.5, 2.0, 2.0, cfg,
        )
        product, _ = product_dyadic_maximal(
            Atomic(np.array([[2.0 ** 70, 1.0], [2.0 ** 71, 1.0]]), np.ones(2)),
            0.5, 0.5, cfg, cfg, np.array([[2.0 ** 70, 1.0]]),
        )
    assert values[0] == pytest.approx(1.0)
    assert apart == 0.0
    assert product[0] == pytest.approx(1.0)


def test_weak_type_inequality_random_atoms():
    """λ·ω({M(fσ) > λ})^{1/q} ≤ A^{dy}(σ, ω)·‖f‖_{L^p(σ)}，p ≤ q"""
    rng = np.random.default_rng(3)
    cfg = DyadicConfig(-10, 10)
    violations = 0
    for _ in range(200):
        alpha = rng.uniform(0.1, 0.9)
        p = rng.uniform(1.2, 3.0)
        q = p + rng.uniform(0.0, 3.0)
        k_s, k_w = (int(k) for k in rng.integers(1, 12, size=2))
        sigma = Atomic(rng.uniform(-4, 4, size=(k_s, 1)), rng.uniform(0.1, 2.0, size=k_s))
        omega = Atomic(rng.uniform(-4, 4, size=(k_w, 1)), rng.uniform(0.1, 2.0, size=k_w))
        f = rng.uniform(0.1, 3.0, size=sigma.points.shape[0])

        f_sigma = Atomic(sigma.points, f * sigma.masses)
        values, _ = dyadic_fractional_maximal_1d(f_sigma, alpha, cfg, omega.points)
        f_norm = float(np.sum(f ** p * sigma.masses)) ** (1 / p)
        lhs = weak_type_quotient(values, omega, q, f_norm)
        rhs = dyadic_characteristic_1param(sigma, omega, alpha, p, q, cfg)
        if lhs > rhs * (1 + 1e-9):
            violations += 1
    assert violations == 0


# ============================================================
# Dirac 极值检验对
# ============================================================

def test_dirac_extremal_pair_quotient():
    omega = Atomic(np.array([[4.0, 1.0]]), np.array([3.0]))
    pair = dirac_extremal_pair(omega, 0.5, 0.5, 2.0)
    # K = 4^{−1/2}，商 = (K^2·3)^{1/2}
    assert norm_lower_bound([pair], 0.5, 0.5) == pytest.approx(0.5 * math.sqrt(3.0))


def test_dirac_pair_rejects_axis_atoms():
    omega = Atomic(np.array([[0.0, 1.0]]), np.array([1.0]))
    with pytest.raises(OperatorDomainError):
        dirac_extremal_pair(omega, 0.5, 0.5, 2.0)


def test_norm_lower_bound_skips_zero_norms():
    assert norm_lower_bound([], 0.5, 0.5) == 0.0


def _grid_two_tailed(R: Rectangle, alpha: float, beta: float, p: float, q: float,
                     sigma: GridFunction, omega: GridFunction) -> float:
    """s^{α−1}t^{β−1}(∫ŝ^{p′}dσ)^{1/p′}(∫ŝ^q dω)^{1/q}，单元中点求和"""
    tf = TailFunction(R, alpha, beta)
    p_prime = p / (p - 1)

    def moment(grid: GridFunction, power: float) -> float:
        xx, yy = np.meshgrid(grid.midpoints1, grid.midpoints2, indexing="ij")
        tails = tf.values(np.stack([xx.ravel(), yy.ravel()], axis=1)).reshape(grid.resolution)
        return float(np.sum(tails ** power * grid.values) * grid.cell_area)

    return (R.s ** (alpha - 1) * R.t ** (beta - 1)
            * moment(sigma, p_prime) ** (1 / p_prime) * moment(omega, q) ** (1 / q))


def test_tail_pair_bounds_two_tailed_local_value():
    sigma = GridFunction((-4.0, 4.0, -4.0, 4.0), np.ones((32, 32)))
    omega = GridFunction((-4.0, 4.0, -4.0, 4.0), np.ones((32, 32)))
    R = Rectangle.centered(1, 1, 1.0, 1.0)
    pair = tail_test_pair(R, 0.5, 0.5, 2.0, 4.0, sigma, omega)
    lower = norm_lower_bound([pair], 0.5, 0.5)
    assert lower >= 0.8 * _grid_two_tailed(R, 0.5, 0.5, 2.0, 4.0, sigma, omega)
