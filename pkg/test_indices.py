#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试指数运算

验证：
1. 有理数字面量保持精确
2. 共轭、间隙与对偶
3. 正负部的 0_+ 边界标记
"""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from indices import (
    IndexDomainError,
    ProductIndices,
    conjugate,
    delta_bracket,
    format_scalar,
    gamma_gap,
    negative_part,
    parse_assignments,
    parse_real,
    positive_part,
    sign_of,
)


def test_parse_real_keeps_rationals():
    assert parse_real("4/3") == Fraction(4, 3)
    assert parse_real("0.25") == Fraction(1, 4)
    assert parse_real(2) == Fraction(2)
    assert isinstance(parse_real(0.1), float)


@pytest.mark.parametrize("literal", ["", "abc", "1/0", "inf", "nan"])
def test_parse_real_rejects(literal):
    with pytest.raises(IndexDomainError):
        parse_real(literal)


def test_parse_assignments():
    values = parse_assignments("m=1,n=2, p=4/3 Alpha=0.5")
    assert values == {"m": 1, "n": 2, "p": Fraction(4, 3), "alpha": Fraction(1, 2)}
    with pytest.raises(IndexDomainError):
        parse_assignments("p")


def test_conjugate_exact():
    assert conjugate(Fraction(4, 3)) == 4
    assert conjugate(2) == 2
    with pytest.raises(IndexDomainError):
        conjugate(1)


@given(st.fractions(min_value=Fraction(101, 100), max_value=50))
def test_conjugate_is_involution(p):
    assert conjugate(conjugate(p)) == p
    assert 1 / p + 1 / conjugate(p) == 1


def test_gap():
    assert gamma_gap(2, 4) == Fraction(1, 4)
    assert gamma_gap(4, 2) == Fraction(-1, 4)


def test_dual_preserves_gap():
    idx = ProductIndices.parse("m=1,n=2,p=4/3,q=3,alpha=1/2,beta=1")
    dual = idx.dual()
    assert (dual.p, dual.q) == (Fraction(3, 2), Fraction(4))
    assert dual.gap == idx.gap
    assert dual.dual() == idx


def test_indices_validation():
    with pytest.raises(IndexDomainError):
        ProductIndices(m=0, n=1, p=2, q=4, alpha=0, beta=0)
    with pytest.raises(IndexDomainError):
        ProductIndices(m=1, n=1, p=1, q=4, alpha=0, beta=0)
    with pytest.raises(IndexDomainError):
        ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=1/4")
    with pytest.raises(IndexDomainError):
        ProductIndices.parse("m=1/2,n=1,p=2,q=4,alpha=1/4,beta=1/4")


def test_indices_to_dict_canonical():
    idx = ProductIndices.parse("m=1,n=1,p=2,q=4,alpha=0.25,beta=1/4")
    assert idx.to_dict() == {"m": "1", "n": "1", "p": "2", "q": "4", "alpha": "1/4", "beta": "1/4"}
    assert idx.is_exact


def test_sign_with_tolerance():
    assert sign_of(Fraction(0)) == 0
    assert sign_of(1e-12) == 0
    assert sign_of(1e-12, tol=0.0) == 1
    assert sign_of(-0.5) == -1


def test_signed_parts_mark_boundary():
    assert positive_part(Fraction(0)).at_boundary
    part = positive_part(Fraction(-1, 2))
    assert part.value == 0 and not part.at_boundary
    assert negative_part(Fraction(-1, 2)).value == Fraction(1, 2)


def test_delta_bracket():
    # (γ − 1/4)_+ + (δ − 1/2)_+ 对 p=2, q=4, dim=1
    value, boundary = delta_bracket(Fraction(1, 2), Fraction(1), 1, 2, 4)
    assert value == Fraction(1, 4) + Fraction(1, 2)
    assert not boundary
    value, boundary = delta_bracket(Fraction(1, 4), Fraction(0), 1, 2, 4)
    assert value == 0 and boundary


def test_format_scalar():
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(Fraction(2)) == "2"
    assert format_scalar(0.1) == "0.1"
    assert format_scalar(None) == ""
