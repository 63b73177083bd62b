from fractions import Fraction
from math import comb, factorial

import pytest

from besselcy.annihilator import (
    BaseEquation,
    bessel_k_power,
    ladder,
    m_plus,
    scaling_lemma_check,
    sqrt_exp_power,
    symmetric_power,
)
from besselcy.theta import THETA, ThetaOperator, ThetaPoly, apply_to_series, parse_operator

from oracles import i0_power_coefficients


def power_series(base, m, n_terms):
    out = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
    for _ in range(m):
        out = [sum(out[i] * base[n - i] for i in range(n + 1)) for n in range(n_terms)]
    return out


def test_m1_returns_the_base_equation():
    assert bessel_k_power(1) == parse_operator("theta^2 - x^2")
    assert sqrt_exp_power(1) == parse_operator("theta^2 - x")


def test_t4_exact():
    expected = parse_operator("theta^5 - 4*x^2*(theta+1)*(5*theta^2+10*theta+8) + 64*x^4*(theta+2)")
    assert bessel_k_power(4) == expected


@pytest.mark.parametrize("m", range(1, 8))
def test_shape(m):
    t, s = bessel_k_power(m), sqrt_exp_power(m)
    assert t.order == m + 1 and s.order == m + 1
    assert s.x_degree == m_plus(m)
    assert t.is_even() and t.x_degree == 2 * m_plus(m)


@pytest.mark.parametrize("m", range(1, 7))
def test_t_m_kills_i0_power(m):
    coeffs = i0_power_coefficients(m, 40)
    assert all(v == 0 for v in apply_to_series(bessel_k_power(m), coeffs))


@pytest.mark.parametrize("m", range(1, 7))
def test_s_m_kills_power_of_inverse_factorial_squares(m):
    base = [Fraction(1, factorial(n) ** 2) for n in range(30)]
    assert all(v == 0 for v in apply_to_series(sqrt_exp_power(m), power_series(base, m, 30)))


def test_s2_on_central_binomial_series():
    coeffs = [Fraction(comb(2 * n, n), factorial(n) ** 2) for n in range(30)]
    assert all(v == 0 for v in apply_to_series(sqrt_exp_power(2), coeffs))


def test_ladder_is_raw_and_starts_with_one_and_theta():
    ops = ladder(BaseEquation.SQRT_EXP, 3)
    assert len(ops) == 5
    assert ops[0] == ThetaOperator({0: ThetaPoly.constant(1)}) and ops[1] == ThetaOperator({0: THETA})
    assert symmetric_power(BaseEquation.SQRT_EXP, 3) == sqrt_exp_power(3)


def test_scaling_lemma_scalars():
    rows = scaling_lemma_check(4)
    assert [r.k for r in rows] == list(range(6))
    assert all(r.even and r.holds for r in rows)
    assert [r.scalar for r in rows] == [Fraction(1, 2**k) for k in range(6)]


@pytest.mark.parametrize("m", range(1, 8))
def test_scaling_lemma_holds_for_all_m(m):
    assert all(r.scalar == Fraction(1, 2**r.k) for r in scaling_lemma_check(m))


def test_invalid_arguments():
    with pytest.raises(ValueError):
        ladder(BaseEquation.BESSEL_K, 0)
    with pytest.raises(ValueError):
        scaling_lemma_check(3, 5)
    with pytest.raises(ValueError):
        BaseEquation.from_name("J0")
    assert BaseEquation.from_name("k0") is BaseEquation.BESSEL_K
