#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试指数定律

验证：
1. 区域分类
2. 幂权特征量有限性（含 0_+ 加严）
3. 乘积 Stein–Weiss 两条判定路线在远离边界的随机样本上一致；对偶不变；精确取等不算“边界附近”
4. 单参数条件、半平衡充分条件与最优指数
"""

import logging
from fractions import Fraction

import numpy as np
import pytest

import laws
from indices import ProductIndices
from laws import (
    Regime,
    RegimeMismatchError,
    RouteContradictionError,
    classify,
    one_weight_necessary,
    optimal_exponent,
    power_characteristic_finite,
    power_corollary_bounds,
    product_stein_weiss_valid,
    regime_report,
    sample_margin,
    stein_weiss_1param_valid,
    half_balanced_sufficiency,
)
from models.report_models import Verdict
from weights import Constant, RadialPower

BALANCED = "m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4"


def _idx(text: str) -> ProductIndices:
    return ProductIndices.parse(text)


# ============================================================
# 区域分类
# ============================================================

@pytest.mark.parametrize("text, regime", [
    (BALANCED, Regime.BALANCED),
    ("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/2", Regime.HALF_BALANCED),
    ("m=1,n=1,p=2,q=4,alpha=1/2,beta=1/2", Regime.STRICTLY_SUBBALANCED),
    ("m=1,n=1,p=2,q=4,alpha=1/8,beta=1/2", Regime.SUPERCRITICAL),
    ("m=1,n=1,p=2,q=2,alpha=1/2,beta=1/2", Regime.DEGENERATE),
    ("m=2,n=1,p=2,q=4,alpha=1/2,beta=1/4", Regime.BALANCED),
])
def test_classify(text, regime):
    assert classify(_idx(text)) is regime


def test_regime_report_values():
    report = regime_report(_idx(BALANCED))
    assert report.regime == "Balanced"
    assert report.gap == pytest.approx(0.25)


def test_one_weight_necessary_balanced():
    assert one_weight_necessary(_idx(BALANCED)).decision is True
    assert one_weight_necessary(_idx("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/2")).decision is False


# ============================================================
# 幂权特征量
# ============================================================

def test_power_characteristic_finite_balanced_unweighted():
    verdict = power_characteristic_finite(_idx(BALANCED), 0, 0)
    assert verdict.decision is True
    assert verdict.witness("alpha-line lower").satisfied


def test_power_characteristic_formula_fails():
    verdict = power_characteristic_finite(_idx("m=1,n=1,p=2,q=4,alpha=1/2,beta=1/2"), 0, 0)
    assert verdict.decision is False
    assert "formula: gap == (alpha+beta-gamma-delta)/(m+n)" in [w.name for w in verdict.failed()]


def test_zero_plus_tightens_to_strict():
    """γ = 1/q 使 Δ 中的正部恰为 0_+，α 线下界变为严格不等式"""
    ok = power_characteristic_finite(_idx("m=1,n=1,p=2,q=4,alpha=3/8,beta=3/8"), Fraction(1, 4), 0)
    assert ok.decision is True
    assert ok.strictness_notes
    assert ok.witness("alpha-line lower").strict

    fails = power_characteristic_finite(_idx("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/2"), Fraction(1, 4), 0)
    assert fails.decision is False
    lower = fails.witness("alpha-line lower")
    assert lower.relation == "<" and not lower.satisfied


def test_local_integrability_required():
    verdict = power_characteristic_finite(_idx("m=1,n=1,p=2,q=4,alpha=1,beta=1"), Fraction(1, 2), Fraction(1, 2))
    assert not verdict.witness("local integrability omega: gamma*q < m+n").satisfied


def test_corollary_bounds_hold_when_finite():
    idx = _idx("m=1,n=1,p=2,q=4,alpha=7/20,beta=7/20")
    gamma, delta = Fraction(1, 10), Fraction(1, 10)
    assert power_characteristic_finite(idx, gamma, delta).decision is True
    assert power_corollary_bounds(idx, gamma, delta).decision is True


def test_float_inputs_record_near_boundary():
    idx = ProductIndices(m=1, n=1, p=2.0, q=4.0, alpha=0.25, beta=0.25 + 1e-8)
    verdict = power_characteristic_finite(idx, 0.0, 1e-8)
    assert verdict.near_boundary


def test_exact_equalities_are_ties_not_near_boundary(caplog):
    """精确平衡元组上 α 线两端取等：记为 boundary_ties，不报"边界附近"警告"""
    with caplog.at_level(logging.WARNING, logger="laws"):
        verdict = power_characteristic_finite(_idx(BALANCED), 0, 0)
    assert verdict.decision is True
    assert verdict.near_boundary == []
    assert "alpha-line lower" in verdict.boundary_ties
    assert "边界附近" not in caplog.text


def test_exact_route_disagreement_off_boundary_raises(monkeypatch):
    idx = _idx("m=1,n=1,p=2,q=4,alpha=7/20,beta=7/20")
    gamma, delta = Fraction(1, 10), Fraction(1, 10)
    assert not product_stein_weiss_valid(idx, gamma, delta).boundary_ties
    monkeypatch.setattr(laws, "_route_characteristic",
                        lambda *args: Verdict(decision=False))
    with pytest.raises(RouteContradictionError):
        product_stein_weiss_valid(idx, gamma, delta)


def test_exact_route_disagreement_on_tie_is_logged(monkeypatch, caplog):
    monkeypatch.setattr(laws, "_route_characteristic",
                        lambda *args: Verdict(decision=False))
    with caplog.at_level(logging.WARNING, logger="laws"):
        verdict = product_stein_weiss_valid(_idx(BALANCED), 0, 0)
    assert verdict.decision is True
    assert any("boundary disagreement" in note for note in verdict.notes)
    assert "判定路线分歧" in caplog.text


# ============================================================
# Stein–Weiss
# ============================================================

def test_product_stein_weiss_balanced():
    assert product_stein_weiss_valid(_idx(BALANCED), 0, 0).decision is True


def test_product_stein_weiss_requires_p_le_q():
    idx = _idx("m=1,n=1,p=4,q=2,alpha=0,beta=-1/2")
    verdict = product_stein_weiss_valid(idx, 0, 0)
    assert verdict.decision is False
    assert not verdict.witness("p <= q").satisfied


def test_product_stein_weiss_mixed_signs():
    idx = _idx("m=1,n=1,p=2,q=4,alpha=7/20,beta=7/20")
    assert product_stein_weiss_valid(idx, Fraction(-1, 10), Fraction(3, 10)).decision is True


def test_exceptional_alpha_equals_m_reduces():
    # α = m：约化为 R^1 上的单参数问题 (β, γ − 1/q, δ − 1/p′)
    idx = _idx("m=1,n=1,p=2,q=4,alpha=1,beta=1/4")
    gamma = delta = Fraction(3, 8)
    verdict = product_stein_weiss_valid(idx, gamma, delta)
    assert verdict.decision is False
    assert "exceptional case alpha = m" in verdict.notes
    assert any(w.name.startswith("reduced: ") for w in verdict.witnesses)


def _random_tuple(rng: np.random.Generator):
    m, n = (int(v) for v in rng.integers(1, 4, size=2))
    p = Fraction(int(rng.integers(11, 41)), 10)
    q = Fraction(int(rng.integers(11, 81)), 10)
    gamma = Fraction(int(rng.integers(-20, 41)), 20)
    delta = Fraction(int(rng.integers(-20, 41)), 20)
    alpha = Fraction(int(rng.integers(1, 20 * m)), 20)
    gap = 1 / p - 1 / q
    # β 由公式 Γ = (α+β−γ−δ)/(m+n) 确定
    beta = (m + n) * gap - alpha + gamma + delta
    return ProductIndices(m=m, n=n, p=p, q=q, alpha=alpha, beta=beta), gamma, delta


def test_routes_agree_on_random_rational_tuples():
    """约束路线与 (p ≤ q) ∧ 特征量有限 在远离边界（差值 > 1e-3）的样本上一致"""
    rng = np.random.default_rng(20240601)
    compared = 0
    for _ in range(10_000):
        idx, gamma, delta = _random_tuple(rng)
        verdict = product_stein_weiss_valid(idx, gamma, delta)
        finite = power_characteristic_finite(idx, gamma, delta)
        clean, _ = sample_margin(verdict, 1e-3)
        clean_finite, _ = sample_margin(finite, 1e-3)
        if not (clean and clean_finite) or "exceptional" in " ".join(verdict.notes):
            continue
        assert verdict.decision == ((idx.p <= idx.q) and finite.decision), (idx, gamma, delta)
        compared += 1
    assert compared > 2000


def test_duality_preserves_decisions():
    """(p, q) ↦ (q′, p′) 且 γ ↔ δ：特征量有限性与不等式成立与否都不变"""
    rng = np.random.default_rng(20240602)
    for _ in range(2000):
        idx, gamma, delta = _random_tuple(rng)
        dual = idx.dual()
        assert dual.gap == idx.gap
        assert (power_characteristic_finite(dual, delta, gamma).decision
                == power_characteristic_finite(idx, gamma, delta).decision), (idx, gamma, delta)
        assert (product_stein_weiss_valid(dual, delta, gamma).decision
                == product_stein_weiss_valid(idx, gamma, delta).decision), (idx, gamma, delta)


def test_stein_weiss_one_parameter():
    assert stein_weiss_1param_valid(1, 2, 4, Fraction(1, 4), 0, 0).decision is True
    assert stein_weiss_1param_valid(1, 4, 2, Fraction(1, 4), 0, 0).decision is False
    # γ + δ < 0 不允许
    verdict = stein_weiss_1param_valid(1, 2, 4, Fraction(1, 4), Fraction(1, 10), Fraction(-1, 5))
    assert not verdict.witness("gamma+delta >= 0").satisfied


# ============================================================
# 半平衡与最优指数
# ============================================================

def test_half_balanced_sufficiency():
    idx = _idx("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/2")
    verdict = half_balanced_sufficiency(idx, Constant(1.0), Constant(1.0))
    assert verdict.decision is True
    # 报告的 A_1 常数是下界
    assert "w^q: member, A1 constant >= 1" in verdict.notes
    # 非乘积径向幂的 A_1×A_1 成员关系不可判定
    undecided = half_balanced_sufficiency(idx, RadialPower(-1.0), RadialPower(0.5))
    assert undecided.decision is None


def test_half_balanced_requires_regime():
    with pytest.raises(RegimeMismatchError):
        half_balanced_sufficiency(_idx(BALANCED), Constant(1.0), Constant(1.0))


def test_optimal_exponent():
    assert optimal_exponent(2, 4) == 3
    assert optimal_exponent(2, 4, parameters=2) == 6
    assert optimal_exponent(Fraction(4, 3), 4) == 2
    with pytest.raises(ValueError):
        optimal_exponent(2, 4, parameters=3)
