from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besselcy.theta import (
    THETA,
    ThetaOperator,
    ThetaPoly,
    compose_theta_left,
    format_operator,
    mirror_at_infinity,
    mul_x,
    normalize,
    operator_from_json,
    operator_to_json,
    parse_operator,
    parse_poly,
    remove_left_theta_factor,
    scale_x,
    apply_to_series,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=6)
nonzero = rationals.filter(lambda c: c != 0)
polys = st.lists(rationals, min_size=0, max_size=4).map(ThetaPoly)
operators = st.dictionaries(st.integers(0, 4), polys, max_size=4).map(ThetaOperator)
series = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=12, max_size=12)


def test_theta_x_commutation():
    # theta x = x (theta + 1)
    op = compose_theta_left(ThetaOperator({1: ThetaPoly.constant(1)}))
    assert op == ThetaOperator({1: ThetaPoly((1, 1))})


def test_poly_arithmetic_and_division():
    p = (THETA + 1) ** 2 * (THETA - 3)
    q, r = p.divmod(THETA + 1)
    assert r.is_zero() and q == (THETA + 1) * (THETA - 3)
    assert p.gcd((THETA + 1) * (THETA + 7)) == THETA + 1
    assert p(Fraction(3)) == 0


def test_normalize_content_and_sign():
    op = ThetaOperator({0: ThetaPoly((Fraction(-2, 3), Fraction(4, 9))), 2: ThetaPoly.constant(2)})
    n = normalize(op)
    assert n == ThetaOperator({0: ThetaPoly((-3, 2)), 2: ThetaPoly.constant(9)})


def test_scale_x_rejects_zero():
    with pytest.raises(ValueError):
        scale_x(ThetaOperator({0: THETA}), 0)
    with pytest.raises(ValueError):
        mirror_at_infinity(ThetaOperator({0: THETA}), 0)


def test_remove_left_theta_factor():
    inner = ThetaOperator({0: THETA**2, 1: ThetaPoly.constant(-1)})
    outer = compose_theta_left(inner)
    b, g = remove_left_theta_factor(outer)
    assert g == THETA and b == inner


def test_parse_products_and_format():
    op = parse_operator("x^2*(theta+1)^2 - 3*theta + 1/2")
    assert op == ThetaOperator({0: ThetaPoly((Fraction(1, 2), -3)), 2: ThetaPoly((1, 2, 1))})
    assert format_operator(op) == "-3*theta + 1/2 + x^2*theta^2 + 2*x^2*theta + x^2"
    assert parse_poly("(theta-1)*(theta+1)") == ThetaPoly((-1, 0, 1))


def test_parse_rejects_negative_powers():
    with pytest.raises(ValueError):
        parse_operator("x^-1*theta")
    with pytest.raises(ValueError):
        parse_operator("y*theta")
    with pytest.raises(ValueError):
        parse_operator("theta +* 2")


@given(operators, series)
def test_normal_form_is_sound(op, coeffs):
    # theta o A and x^k A act on series as theta and x^k after A
    base = apply_to_series(op, coeffs)
    lifted = apply_to_series(compose_theta_left(op), coeffs)
    assert lifted == [n * v for n, v in enumerate(base)]
    shifted = apply_to_series(mul_x(op, 2), coeffs)
    assert shifted == [Fraction(0)] * 2 + base[:-2]


@given(operators, nonzero)
def test_mirror_is_an_involution(op, c):
    if op.is_zero() or op.x_valuation != 0:
        return
    assert mirror_at_infinity(mirror_at_infinity(op, c), c) == normalize(op)


@given(polys, nonzero, rationals, nonzero, rationals)
def test_affine_substitutions_compose(p, s1, r1, s2, r2):
    assert p.substitute_affine(s1, r1).substitute_affine(s2, r2) == p.substitute_affine(s1 * s2, s1 * r2 + r1)


@given(operators)
def test_normalize_idempotent(op):
    assert normalize(normalize(op)) == normalize(op)


@settings(max_examples=40)
@given(operators)
def test_text_and_json_round_trip(op):
    assert parse_operator(format_operator(op)) == op
    assert operator_from_json(operator_to_json(op)) == op
