#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试实验模块

验证：
1. 夹逼分解在随机合法指数上逐点成立，且每个因子对满足单参数 Stein–Weiss
2. 原子反例的弱型商下界 λ₀·K^{1/q}
3. 半平衡例子：局部值有界、由实际质量算出的单尾部分和线性增长
4. 最优幂次拟合与单尾幂律检查
"""

from fractions import Fraction

import numpy as np
import pytest

from experiments import (
    FeasibilityContradictionError,
    _negative_case,
    example_half,
    example_simple,
    one_tailed_vs_plain_power,
    sandwich_decompose,
    sharpness_fit,
    young_constant,
)
from indices import ProductIndices
from laws import RegimeMismatchError, product_stein_weiss_valid, sample_margin
from operators import OperatorDomainError


# ============================================================
# 夹逼分解
# ============================================================

def _random_valid_tuples(seed: int, wanted: int, draws: int = 200_000):
    """远离边界的合法指数元组：两条判定路线上都没有取等、0_+ 或容差标记"""
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(draws):
        m, n = (int(v) for v in rng.integers(1, 3, size=2))
        p = Fraction(int(rng.integers(11, 31)), 10)
        q = p + Fraction(int(rng.integers(0, 41)), 10)
        gamma = Fraction(int(rng.integers(-10, 21)), 20)
        delta = Fraction(int(rng.integers(-10, 21)), 20)
        alpha = Fraction(int(rng.integers(1, 20 * m)), 20)
        beta = (m + n) * (1 / p - 1 / q) - alpha + gamma + delta
        if beta == n:
            continue
        try:
            idx = ProductIndices(m=m, n=n, p=p, q=q, alpha=alpha, beta=beta)
        except ValueError:
            continue
        verdict = product_stein_weiss_valid(idx, gamma, delta)
        if verdict.decision is True and sample_margin(verdict)[0]:
            found.append((idx, gamma, delta))
            if len(found) == wanted:
                break
    return found


def test_young_constant():
    assert young_constant(Fraction(1, 2)) == 1.0
    assert young_constant(3) == 4.0


def test_sandwich_balanced_unweighted():
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4")
    decomposition = sandwich_decompose(idx, 0, 0, samples=500)
    assert decomposition.case == "nonnegative"
    assert all(pair.valid for pair in decomposition.pairs)
    assert decomposition.max_ratio <= 1 + 1e-9


def test_sandwich_sound_on_random_valid_tuples():
    tuples = _random_valid_tuples(20240607, 1000)
    assert len(tuples) == 1000
    cases = set()
    for idx, gamma, delta in tuples:
        decomposition = sandwich_decompose(idx, gamma, delta, samples=10_000)
        cases.add(decomposition.case)
        assert decomposition.pairs, (idx, gamma, delta)
        assert all(pair.valid for pair in decomposition.pairs), (idx, gamma, delta)
        assert decomposition.max_ratio <= 1 + 1e-9, (idx, gamma, delta)
        if decomposition.case != "nonnegative":
            params = decomposition.parameters
            assert params["rho_1"] == (idx.m + idx.n) * params["b"] / idx.n
            assert params["rho_2"] == (idx.m + idx.n) * params["a"] / idx.m
            assert params["rho_1"] >= 0 and params["rho_2"] >= 0
    assert {"nonnegative", "gamma_negative", "delta_negative"} <= cases


def test_negative_case_rejects_negative_rho():
    # b = β − nΓ = −3/20 < 0，ρ_1 = 2b < 0
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=1/2,beta=1/10")
    with pytest.raises(FeasibilityContradictionError, match="rho_1"):
        _negative_case(idx, Fraction(-1, 10), Fraction(1, 5), True, 1e-10)


def test_sandwich_mixed_signs_uses_young_constant():
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=7/20,beta=7/20")
    decomposition = sandwich_decompose(idx, Fraction(-1, 10), Fraction(3, 10), samples=2000)
    assert decomposition.case == "gamma_negative"
    assert decomposition.young_constant >= 1.0
    assert decomposition.max_ratio <= 1 + 1e-9


def test_sandwich_exceptional_case_reduces():
    # α = m：约化为 (β, γ − 1/q, δ − 1/p′) = (1/2, 1/8, 1/8)
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=1,beta=1/2")
    decomposition = sandwich_decompose(idx, Fraction(3, 8), Fraction(5, 8))
    assert decomposition.case == "exceptional"
    assert decomposition.pairs == ()
    assert decomposition.reduced.decision is True


def test_sandwich_rejects_invalid_tuple():
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=1/2,beta=1/2")
    with pytest.raises(RegimeMismatchError):
        sandwich_decompose(idx, 0, 0)


# ============================================================
# 原子反例
# ============================================================

@pytest.mark.parametrize("K", [16, 32, 64])
def test_simple_example_weak_quotient_grows(K):
    """ρ = ρ* = 1：每个原子处极大函数恰为 λ₀ = 1/2"""
    report = example_simple(1.0, 0.5, 0.5, 2.0, 4.0, K=K)
    assert report.rho_critical == pytest.approx(1.0)
    assert report.characteristic_bounded
    assert report.weak_lower_bound >= 0.5 * K ** 0.25 * (1 - 1e-9)
    assert report.weak_quotient >= report.weak_lower_bound * (1 - 1e-12)


def test_simple_example_supercritical_values_exceed_level():
    report = example_simple(2.0, 0.5, 0.5, 2.0, 4.0, K=16)
    assert min(report.maximal_values) >= 0.5 * (1 - 1e-12)


def test_simple_example_square_exponents_grow_like_sqrt_k():
    """p = q = 2：弱型下界 λ₀·K^{1/2}，对 log K 的斜率为 1/2"""
    Ks = [16, 32, 64, 128]
    bounds = [example_simple(1.0, 0.5, 0.5, 2.0, 2.0, K=K).weak_lower_bound for K in Ks]
    slope = np.polyfit(np.log(Ks), np.log(bounds), 1)[0]
    assert slope == pytest.approx(0.5, abs=1e-9)
    assert bounds[-1] == pytest.approx(0.5 * 128 ** 0.5)


def test_simple_example_subcritical_stays_bounded():
    """ρ = ρ*/2：原子处的极大函数按 2^{−k/4} 衰减，弱型商不随 K 增长"""
    small = example_simple(0.5, 0.5, 0.5, 2.0, 4.0, K=16)
    large = example_simple(0.5, 0.5, 0.5, 2.0, 4.0, K=64)
    assert small.characteristic_bounded and large.characteristic_bounded
    assert large.weak_quotient == pytest.approx(small.weak_quotient, rel=1e-9)
    assert large.maximal_values[-1] < large.maximal_values[0]


def test_simple_example_rejects_bad_input():
    with pytest.raises(ValueError):
        example_simple(1.0, 0.5, 0.5, 2.0, 4.0, K=4)
    with pytest.raises(OperatorDomainError):
        example_simple(1.0, 1.0, 0.5, 2.0, 4.0)


# ============================================================
# 半平衡例子
# ============================================================

@pytest.mark.parametrize("K", [32, 64])
def test_half_example(K):
    """壳层项由 σ 的实际质量算出：齐次性使每一项为 1，部分和为 k+1"""
    report = example_half(2, 4, K=K)
    assert report.alpha == pytest.approx(0.25)
    assert report.plain_bound_ratio < 4.0
    np.testing.assert_allclose(report.shell_terms, np.ones(K + 1), rtol=1e-6)
    np.testing.assert_allclose(report.one_tailed_partial_sums, np.arange(1, K + 2), rtol=1e-6)
    assert report.shell_decay_rate == pytest.approx(0.0, abs=1e-6)
    assert report.one_tailed_diverging
    # p′ = 2：单尾局部值按部分和的平方根增长
    local = report.one_tailed_local_values
    assert local[-1] / local[0] == pytest.approx((K + 1) ** 0.5, rel=1e-6)
    assert report.ap_member
    assert report.ap_window == pytest.approx((-1.0, 0.5, 1.0))


def test_half_example_requires_p_lt_q():
    with pytest.raises(RegimeMismatchError):
        example_half(4, 2)


# ============================================================
# 最优幂次
# ============================================================

def test_sharpness_fit_one_parameter():
    fit = sharpness_fit(2, 4)
    assert fit.target == 3
    assert len(fit.family) >= 5
    assert fit.target - 0.4 <= fit.fitted_slope <= fit.target + 0.1


def test_sharpness_fit_two_parameters_adds_slopes():
    fit = sharpness_fit(2, 4, parameters=2)
    assert fit.target == 6
    assert fit.fitted_slope == pytest.approx(sum(fit.factor_slopes))
    assert fit.target - 0.8 <= fit.fitted_slope <= fit.target + 0.1


def test_sharpness_fit_dual_exponents():
    """p′ = q = 4：最优幂次 max{p′/q, q/p′} + 1 = 2"""
    fit = sharpness_fit(Fraction(4, 3), 4)
    assert fit.target == 2
    assert len(fit.family) >= 5
    assert fit.target - 0.4 <= fit.fitted_slope <= fit.target + 0.1


def test_sharpness_fit_domain():
    with pytest.raises(OperatorDomainError):
        sharpness_fit(2, 4, m=2)
    with pytest.raises(RegimeMismatchError):
        sharpness_fit(4, 2)
    with pytest.raises(ValueError):
        sharpness_fit(2, 4, family_size=3)


def test_one_tailed_power_law():
    report = one_tailed_vs_plain_power(2, 4)
    assert report.exponent == 3
    assert report.violations == 0
    assert report.max_ratio <= report.slack
    assert all(a_bar >= a * (1 - 1e-12) for a, a_bar in zip(report.plain, report.one_tailed))
    # σ = |x|^{(1−ε)/2} 是 1 + (1−ε)/2 次齐次的
    assert report.rd_expected_delta == pytest.approx([1 + (1 - e) / 2 for e in report.samples])
    assert report.rd_relative_error < 1e-6
