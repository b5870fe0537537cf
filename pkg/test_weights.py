#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试权重与测度

验证：
1. 半开矩形的成员判定与原子质量
2. 精确一维积分与可分离乘积质量
3. 无衬线闭式比较值（含对数情形）与自适应求积的比值
4. JSON 编解码与输入校验
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weights import (
    Atomic,
    Constant,
    Density,
    DiracOrigin,
    GridFunction,
    Product,
    ProductMeasure,
    ProductPower,
    RadialPower,
    Rectangle,
    ShiftedPower,
    WeightSpecError,
    a1_product_membership,
    brute_force_orthant_integral,
    dilate_mass_table,
    lebesgue,
    measure_from_dict,
    minimal_dilation,
    rectangle_mass,
    rectangle_masses,
    sans_serif_local_integral,
    weight_from_dict,
)


# ============================================================
# 矩形
# ============================================================

def test_rectangle_is_half_open():
    """右端点不属于矩形"""
    R = Rectangle.cornered(1, 1, 1.0, 2.0)
    pts = np.array([[0.0, 0.0], [0.999, 1.999], [1.0, 0.5], [0.5, 2.0]])
    assert R.contains(pts).tolist() == [True, True, False, False]


def test_rectangle_rejects_bad_side():
    with pytest.raises(WeightSpecError):
        Rectangle((0.0,), (0.0,), 0.0, 1.0)


def test_dilate_scales_sides():
    R = Rectangle.centered(2, 1, 1.0, 4.0).dilate(2, -1)
    assert R.s == 4.0 and R.t == 2.0
    assert R.volume == pytest.approx(32.0)


# ============================================================
# 质量
# ============================================================

def test_atomic_mass_sums_contained_atoms():
    mu = Atomic(np.array([[0.1, 0.1], [0.9, 0.2], [1.0, 0.5]]), np.array([1.0, 2.0, 4.0]))
    R = Rectangle.cornered(1, 1, 1.0, 1.0)
    assert rectangle_mass(mu, R) == 3.0


def test_dirac_origin_mass():
    assert rectangle_mass(DiracOrigin(), Rectangle.centered(1, 1, 1.0, 1.0)) == 1.0
    assert rectangle_mass(DiracOrigin(), Rectangle.cornered(1, 1, 1.0, 1.0)) == 1.0
    assert rectangle_mass(DiracOrigin(), Rectangle((1.0,), (1.0,), 1.0, 1.0)) == 0.0


def test_lebesgue_mass_is_volume():
    R = Rectangle((0.3, -2.0), (5.0,), 0.5, 3.0)
    assert rectangle_mass(lebesgue(), R) == pytest.approx(0.75)


def test_product_of_one_dimensional_powers_is_exact():
    """∫_0^1 x^{-1/2} dx = 2，乘积测度质量为 4"""
    mu = ProductMeasure(Density(RadialPower(-0.5)), Density(RadialPower(-0.5)))
    R = Rectangle.cornered(1, 1, 1.0, 1.0)
    assert rectangle_mass(mu, R) == pytest.approx(4.0, rel=1e-12)


def test_product_power_density_matches_product_measure():
    prod = ProductMeasure(Density(RadialPower(-1.0 / 3.0)), Density(RadialPower(1.0)))
    R = Rectangle((0.7,), (-0.2,), 1.0, 2.0)
    expected = rectangle_mass(prod, Rectangle((0.7,), (-0.2,), 1.0, 2.0))
    assert rectangle_mass(Density(ProductPower(-1.0 / 3.0, 1.0)), R) == pytest.approx(expected)


def test_planar_radial_off_origin():
    """∫_{[-1,1]×[1/2,3/2]} (x²+y²) = 2/3 + 2·13/12"""
    R = Rectangle((0.0,), (1.0,), 2.0, 1.0)
    mass = rectangle_mass(Density(RadialPower(2.0)), R)
    assert mass == pytest.approx(2.0 / 3.0 + 13.0 / 6.0, rel=1e-6)


def test_non_integrable_singularity_is_infinite():
    R = Rectangle.centered(1, 0, 1.0)
    assert math.isinf(rectangle_mass(Density(RadialPower(-1.0)), Rectangle((0.0,), (), 1.0)))
    assert rectangle_mass(Density(RadialPower(-0.5)), R) == pytest.approx(2.0 * 2 * 0.5 ** 0.5)


def test_shifted_power_one_dimensional():
    """∫_{-1}^{1} (1+|x|)^{-2} dx = 1"""
    mass = rectangle_mass(Density(ShiftedPower(-2.0)), Rectangle((0.0,), (), 2.0))
    assert mass == pytest.approx(1.0)


def test_batch_masses_match_single():
    rng = np.random.default_rng(7)
    mu = Atomic(rng.uniform(-2, 2, size=(40, 2)), rng.uniform(0.1, 1.0, size=40))
    rects = [Rectangle((c1,), (c2,), s, t)
             for c1, c2, s, t in rng.uniform([-1, -1, 0.2, 0.2], [1, 1, 3, 3], size=(25, 4))]
    batch = rectangle_masses(mu, rects)
    single = np.array([rectangle_mass(mu, R) for R in rects])
    np.testing.assert_allclose(batch, single, rtol=0, atol=1e-12)


# ============================================================
# 无衬线比较值
# ============================================================

def test_sans_serif_lebesgue_case():
    assert sans_serif_local_integral(1, 1, 2.0, 3.0, 0.0) == pytest.approx(6.0)


def test_sans_serif_log_case():
    """n + η = 0：s^m·(1/n + ln(t/s))"""
    assert sans_serif_local_integral(1, 1, 1.0, 1.0, -1.0) == pytest.approx(1.0)
    assert sans_serif_local_integral(1, 1, 1.0, math.e, -1.0) == pytest.approx(2.0)


def test_sans_serif_divergent():
    assert math.isinf(sans_serif_local_integral(1, 1, 1.0, 1.0, -2.0))


def test_sans_serif_vectorized():
    s = np.array([1.0, 2.0, 4.0])
    out = sans_serif_local_integral(1, 1, s, 1.0, 0.0)
    np.testing.assert_allclose(out, s)


@pytest.mark.parametrize("eta", [-1.5, -1.0, -0.5, 0.0, 0.5])
def test_sans_serif_within_factor_ten_of_quadrature(eta):
    for j in range(-10, 11, 2):
        s, t = 2.0 ** j, 1.0
        closed = sans_serif_local_integral(1, 1, s, t, eta)
        numeric = brute_force_orthant_integral(s, t, eta)
        assert 0.1 <= closed / numeric <= 10.0, (eta, s, closed, numeric)


# ============================================================
# 放大表
# ============================================================

def test_minimal_dilation_half_open():
    pts = np.array([[0.0], [0.49], [0.5], [-0.5], [1.5]])
    k = minimal_dilation(pts, (0.0,), 1.0)
    # Q = [-1/2, 1/2)，2Q = [-1, 1)，4Q = [-2, 2)
    assert k.tolist() == [0, 0, 1, 0, 2]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-64, 64), st.integers(-64, 64)), min_size=1, max_size=12))
def test_dilation_table_matches_direct_masses(points):
    # 二进有理坐标，边界比较无舍入
    mu = Atomic(np.array(points, dtype=float) / 8.0, np.ones(len(points)))
    R = Rectangle((0.25,), (-0.5,), 1.0, 0.5)
    table = dilate_mass_table(mu, R, 5)
    for k1 in (0, 2, 5):
        for k2 in (0, 3, 5):
            assert table[k1, k2] == rectangle_mass(mu, R.dilate(k1, k2))


# ============================================================
# A_1 × A_1 与 JSON
# ============================================================

def test_a1_membership():
    assert a1_product_membership(Product(RadialPower(-0.5), RadialPower(-0.5)), 1, 1) == (True, 4.0)
    assert a1_product_membership(ProductPower(0.5, 0.0), 1, 1)[0] is False
    assert a1_product_membership(Constant(3.0), 2, 2) == (True, 1.0)


def test_a1_constant_is_only_a_lower_bound():
    """偏心区间 [−1/4, 1)：平均值 3/1.25 = 2.4，下确界 1，超过原点锚定给出的 2"""
    w = Product(RadialPower(-0.5), RadialPower(-0.5))
    _, lower = a1_product_membership(w, 1, 1)
    R = Rectangle((0.375,), (0.375,), 1.25, 1.25)
    average = rectangle_mass(Density(w, 1.0), R) / R.s / R.t
    assert average == pytest.approx(2.4 ** 2, rel=1e-9)
    assert average > lower


def test_measure_from_dict_atomic_with_rationals():
    mu = measure_from_dict({"kind": "atomic", "atoms": [[[0.5, 0.5], 1], [[0.75, 0.25], "1/2"]]})
    assert isinstance(mu, Atomic)
    assert mu.masses.tolist() == [1.0, 0.5]
    assert mu.dim == 2


def test_weight_document_becomes_density():
    mu = measure_from_dict({"kind": "radial_power", "exponent": "-1/2"})
    assert isinstance(mu, Density)
    assert mu.weight == RadialPower(-0.5)


def test_round_trip_product_weight():
    w = Product(ShiftedPower(-1.0), RadialPower(0.25))
    assert weight_from_dict(w.to_dict()) == w


def test_unknown_kind_rejected():
    with pytest.raises(WeightSpecError):
        weight_from_dict({"kind": "gaussian"})


def test_grid_rejects_negative_values():
    with pytest.raises(WeightSpecError):
        GridFunction((0, 1, 0, 1), np.array([[1.0, -1.0]]))
