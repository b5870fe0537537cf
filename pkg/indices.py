#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
指数运算模块

所有模块共用的指数元组 (m, n, p, q, α, β) 以及与之相关的指数算术：
Hölder 共轭、间隙 Γ = 1/p − 1/q、正负部（带 0_+ 边界标记）以及 Δ 括号。

输入既可以是浮点数，也可以是精确有理数（例如命令行中的 p=4/3）。
当所有输入都是有理数时，等式和边界判定按精确算术进行；
否则使用可配置的容差（默认 1e-10）。
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

Scalar = Union[Fraction, float]


class IndexDomainError(ValueError):
    """指数超出允许范围（例如 p ≤ 1 或非有限值）"""


def parse_real(text: Union[str, int, float, Fraction]) -> Scalar:
    """
    解析实数字面量

    支持整数、小数和 a/b 形式；可精确表示的字面量保留为 Fraction。

    Examples:
        >>> parse_real("4/3")
        Fraction(4, 3)
        >>> parse_real("0.25")
        Fraction(1, 4)
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise IndexDomainError(f"不是实数: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        if not math.isfinite(text):
            raise IndexDomainError(f"指数必须有限: {text!r}")
        return text

    literal = str(text).strip()
    if not literal:
        raise IndexDomainError("空的数值字面量")
    try:
        return Fraction(literal)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        value = float(literal)
    except ValueError as e:
        raise IndexDomainError(f"无法解析数值: {literal!r}") from e
    if not math.isfinite(value):
        raise IndexDomainError(f"指数必须有限: {literal!r}")
    return value


def is_exact(*values: object) -> bool:
    """所有值均为精确有理数时返回 True"""
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)


def as_float(value: Scalar) -> float:
    return float(value)


def sign_of(value: Scalar, tol: float = 1e-10) -> int:
    """
    返回 value 的符号 (-1, 0, 1)

    精确值按精确比较；浮点值在 |value| ≤ tol 时视为 0。
    """
    if is_exact(value):
        return (value > 0) - (value < 0)
    v = float(value)
    if abs(v) <= tol:
        return 0
    return 1 if v > 0 else -1


def _coerce(value: Scalar) -> Scalar:
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def _require_exponent(p: Scalar, name: str = "p") -> None:
    if not math.isfinite(float(p)) or p <= 1:
        raise IndexDomainError(f"{name} 必须满足 1 < {name} < ∞，实际为 {p}")


def conjugate(p: Scalar) -> Scalar:
    """
    Hölder 共轭 p′ = p/(p−1)

    Raises:
        IndexDomainError: p ≤ 1 或 p 非有限
    """
    p = _coerce(p)
    _require_exponent(p)
    return p / (p - 1)


def gamma_gap(p: Scalar, q: Scalar) -> Scalar:
    """Γ = 1/p − 1/q"""
    p, q = _coerce(p), _coerce(q)
    _require_exponent(p, "p")
    _require_exponent(q, "q")
    return 1 / p - 1 / q


@dataclass(frozen=True)
class SignedPart:
    """
    正部或负部

    Attributes:
        value: max{t,0}（或 max{−t,0}），非负
        at_boundary: 原始参数恰好为 0（0_+ 约定下对应的不等式变为严格）
    """
    value: Scalar
    at_boundary: bool

    def __post_init__(self):
        if self.value < 0:
            raise IndexDomainError(f"正负部不能为负: {self.value}")
        if self.at_boundary and self.value != 0:
            raise IndexDomainError("边界标记要求 value = 0")


def positive_part(t: Scalar, tol: float = 0.0) -> SignedPart:
    """t_+ = max{t, 0}；tol > 0 时对浮点输入按容差判定边界"""
    s = sign_of(t, tol)
    if s == 0:
        return SignedPart(value=t * 0, at_boundary=True)
    return SignedPart(value=t if s > 0 else t * 0, at_boundary=False)


def negative_part(t: Scalar, tol: float = 0.0) -> SignedPart:
    """t_− = max{−t, 0}"""
    s = sign_of(t, tol)
    if s == 0:
        return SignedPart(value=t * 0, at_boundary=True)
    return SignedPart(value=-t if s < 0 else t * 0, at_boundary=False)


def delta_bracket(
    gamma: Scalar,
    delta: Scalar,
    dim: int,
    p: Scalar,
    q: Scalar,
    tol: float = 0.0
) -> Tuple[Scalar, bool]:
    """
    Δ_{p,q}^{γ,δ}(dim) = (γ − dim/q)_+ + (δ − dim/p′)_+

    Returns:
        (value, any_boundary)：any_boundary 表示两个参数之一恰为 0
    """
    p_prime = conjugate(p)
    first = positive_part(gamma - dim / q, tol)
    second = positive_part(delta - dim / p_prime, tol)
    return first.value + second.value, first.at_boundary or second.at_boundary


@dataclass(frozen=True)
class ProductIndices:
    """
    乘积分数次积分的指数元组

    Attributes:
        m, n: 两个因子空间的维数
        p, q: Lebesgue 指数，1 < p, q < ∞
        alpha, beta: 两个因子上的分数阶
    """
    m: int
    n: int
    p: Scalar
    q: Scalar
    alpha: Scalar
    beta: Scalar

    def __post_init__(self):
        for name in ("m", "n"):
            dim = getattr(self, name)
            if isinstance(dim, bool) or int(dim) != dim or dim < 1:
                raise IndexDomainError(f"{name} 必须是正整数，实际为 {dim}")
            object.__setattr__(self, name, int(dim))
        for name in ("p", "q", "alpha", "beta"):
            value = getattr(self, name)
            if isinstance(value, int) and not isinstance(value, bool):
                object.__setattr__(self, name, Fraction(value))
        _require_exponent(self.p, "p")
        _require_exponent(self.q, "q")
        for name in ("alpha", "beta"):
            if not math.isfinite(float(getattr(self, name))):
                raise IndexDomainError(f"{name} 必须有限")

    @property
    def p_prime(self) -> Scalar:
        return conjugate(self.p)

    @property
    def q_prime(self) -> Scalar:
        return conjugate(self.q)

    @property
    def gap(self) -> Scalar:
        """Γ = 1/p − 1/q"""
        return gamma_gap(self.p, self.q)

    @property
    def is_exact(self) -> bool:
        return is_exact(self.p, self.q, self.alpha, self.beta)

    def dual(self) -> "ProductIndices":
        """对偶元组：(p, q) ↦ (q′, p′)，Γ 不变"""
        return ProductIndices(
            m=self.m, n=self.n,
            p=self.q_prime, q=self.p_prime,
            alpha=self.alpha, beta=self.beta,
        )

    def with_exponents(self, p: Scalar, q: Scalar) -> "ProductIndices":
        return ProductIndices(m=self.m, n=self.n, p=p, q=q, alpha=self.alpha, beta=self.beta)

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "ProductIndices":
        missing = [k for k in ("m", "n", "p", "q", "alpha", "beta") if k not in values]
        if missing:
            raise IndexDomainError(f"缺少指数: {', '.join(missing)}")
        m = parse_real(values["m"])
        n = parse_real(values["n"])
        if not is_exact(m) or not is_exact(n) or m.denominator != 1 or n.denominator != 1:
            raise IndexDomainError("m, n 必须是正整数")
        return cls(
            m=int(m), n=int(n),
            p=parse_real(values["p"]), q=parse_real(values["q"]),
            alpha=parse_real(values["alpha"]), beta=parse_real(values["beta"]),
        )

    @classmethod
    def parse(cls, text: str) -> "ProductIndices":
        """
        解析命令行形式 "m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4"
        """
        return cls.from_mapping(parse_assignments(text))

    def to_dict(self) -> Dict[str, str]:
        """规范字符串形式，有理数保留为 a/b"""
        return {
            "m": str(self.m),
            "n": str(self.n),
            "p": format_scalar(self.p),
            "q": format_scalar(self.q),
            "alpha": format_scalar(self.alpha),
            "beta": format_scalar(self.beta),
        }


def parse_assignments(text: str) -> Dict[str, Scalar]:
    """
    解析 key=value 列表（逗号或空白分隔）

    Examples:
        >>> parse_assignments("p=4/3, gamma=0")
        {'p': Fraction(4, 3), 'gamma': Fraction(0, 1)}
    """
    result: Dict[str, Scalar] = {}
    for token in text.replace(",", " ").split():
        if "=" not in token:
            raise IndexDomainError(f"缺少 '=': {token!r}")
        key, _, raw = token.partition("=")
        key = key.strip().lower()
        if not key:
            raise IndexDomainError(f"空的键名: {token!r}")
        result[key] = parse_real(raw)
    return result


def format_scalar(value: Optional[Scalar]) -> str:
    if value is None:
        return ""
    if is_exact(value):
        frac = Fraction(value)
        return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"
    return repr(float(value))
