"""Annihilators of m-th powers of solutions of ``theta^2 y = g y``.

Two bases are used: ``g = x^2`` (K0 and I0) and ``g = x`` (the series
``sum x^n / n!^2``).  The ladder

    L_0 = 1,  L_1 = theta,
    L_{k+1} = theta L_k - k (m - k + 1) g L_{k-1}

ends with ``L_{m+1}``, which annihilates ``y^m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .theta import (
    ONE,
    THETA,
    ThetaOperator,
    compose_theta_left,
    mul_x,
    normalize,
    substitute_theta_affine,
)


class BaseEquation(enum.Enum):
    BESSEL_K = 2  # theta^2 - x^2
    SQRT_EXP = 1  # theta^2 - x

    @property
    def g_power(self) -> int:
        return self.value

    @property
    def operator(self) -> ThetaOperator:
        return ThetaOperator({0: THETA**2, self.g_power: ONE * -1})

    @classmethod
    def from_name(cls, name: str) -> "BaseEquation":
        key = name.strip().upper()
        aliases = {"K0": cls.BESSEL_K, "I0": cls.BESSEL_K, "BESSEL_K": cls.BESSEL_K,
                   "SQRT_EXP": cls.SQRT_EXP, "S": cls.SQRT_EXP, "I0SQRT": cls.SQRT_EXP}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown base equation {name!r}") from None


def m_plus(m: int) -> int:
    return (m + 1) // 2


def ladder(base: BaseEquation, m: int, k_max: int | None = None) -> list[ThetaOperator]:
    """Raw (unnormalized) ladder ``[L_0, ..., L_{k_max}]``; default ``k_max = m + 1``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    k_max = m + 1 if k_max is None else k_max
    ops = [ThetaOperator.from_poly(ONE), ThetaOperator.from_poly(THETA)]
    for k in range(1, k_max):
        nxt = compose_theta_left(ops[k]) - mul_x(ops[k - 1], base.g_power).scale(k * (m - k + 1))
        ops.append(nxt)
    return ops[: k_max + 1]


def symmetric_power(base: BaseEquation, m: int) -> ThetaOperator:
    """Normalized annihilator of ``y^m`` (``T_m`` for BESSEL_K, ``S_m`` for SQRT_EXP)."""
    return normalize(ladder(base, m)[m + 1])


def bessel_k_power(m: int) -> ThetaOperator:
    return symmetric_power(BaseEquation.BESSEL_K, m)


def sqrt_exp_power(m: int) -> ThetaOperator:
    return symmetric_power(BaseEquation.SQRT_EXP, m)


def halve_even_x(a: ThetaOperator) -> ThetaOperator | None:
    """Substitute x -> 2 sqrt(x), i.e. x^(2j) -> 4^j x^j; None if an odd power occurs."""
    if not a.is_even():
        return None
    return ThetaOperator((j // 2, p * 4 ** (j // 2)) for j, p in a.terms.items())


def scalar_ratio(a: ThetaOperator, b: ThetaOperator) -> Fraction | None:
    """The rational ``s`` with ``a == s*b`` if it exists."""
    if a.is_zero() or b.is_zero():
        return Fraction(1) if a.is_zero() and b.is_zero() else None
    ta, tb = a.terms, b.terms
    if ta.keys() != tb.keys():
        return None
    j0 = min(ta)
    s = ta[j0].leading / tb[j0].leading
    return s if a == b.scale(s) else None


@dataclass(frozen=True)
class LemmaRow:
    k: int
    even: bool
    scalar: Fraction | None

    @property
    def holds(self) -> bool:
        return self.scalar is not None


def scaling_lemma_check(m: int, k_max: int | None = None) -> list[LemmaRow]:
    """Compare ``M_k`` with ``L_k(2 sqrt(x), 2 theta)`` along both ladders.

    Each row records the exact scalar ``s`` with ``M_k = s * L_k(2 sqrt x, 2 theta)``.
    """
    k_max = m + 1 if k_max is None else k_max
    if k_max > m + 1:
        raise ValueError("k_max must not exceed m + 1")
    ms = ladder(BaseEquation.SQRT_EXP, m, k_max)
    ls = ladder(BaseEquation.BESSEL_K, m, k_max)
    rows = []
    for k in range(k_max + 1):
        halved = halve_even_x(ls[k])
        if halved is None:
            rows.append(LemmaRow(k, False, None))
            continue
        transformed = substitute_theta_affine(halved, 2, 0)
        rows.append(LemmaRow(k, True, scalar_ratio(ms[k], transformed)))
    return rows
