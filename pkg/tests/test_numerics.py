import mpmath
import pytest

from besselcy.numerics import (
    PrecisionNotReached,
    QuadratureSpec,
    bessel_K0,
    bessel_moment,
    verify_moment_recurrence,
    zeta3,
)

from oracles import k0_series, zeta3_amdeberhan_zeilberger

PREC = 50


def tol(digits):
    return mpmath.mpf(10) ** -digits


@pytest.mark.parametrize("x", ["0.5", "1", "2", "5"])
def test_k0_against_log_series(x):
    v = bessel_K0(mpmath.mpf(x), PREC)
    with mpmath.workdps(PREC + 10):
        assert abs(v.value - k0_series(mpmath.mpf(x), PREC + 10)) < tol(PREC - 3)
        assert abs(v.value - mpmath.besselk(0, mpmath.mpf(x))) < tol(PREC - 3)
    assert v.error_bound <= tol(PREC)


def test_k0_at_one_digits():
    assert bessel_K0(1, 17).digits(17) == "0.42102443824070833"


def test_k0_large_x_and_monotone():
    v = bessel_K0(10, 20).value
    lead = v * mpmath.exp(10) * mpmath.sqrt(10) / mpmath.sqrt(mpmath.pi / 2)
    assert abs(lead - 1) < 0.02
    assert bessel_K0(1, 20).value > bessel_K0(2, 20).value > bessel_K0(3, 20).value


def test_k0_rejects_nonpositive():
    with pytest.raises(ValueError):
        bessel_K0(0)


def test_level_cap_raises():
    with pytest.raises(PrecisionNotReached):
        bessel_K0(1, 50, QuadratureSpec(level=0, max_level=1))
    with pytest.raises(ValueError):
        QuadratureSpec(level=5, max_level=13)


def test_c10_is_half_pi():
    v = bessel_moment(1, 0, PREC)
    with mpmath.workdps(PREC + 10):
        assert abs(v.value - mpmath.pi / 2) < tol(40)
    assert v.error_bound <= tol(PREC)


def test_c21_is_one_half():
    with mpmath.workdps(PREC + 10):
        assert abs(bessel_moment(2, 1, PREC).value - mpmath.mpf(1) / 2) < tol(40)


def test_c4_odd_moments_against_zeta3():
    with mpmath.workdps(PREC + 10):
        z = mpmath.zeta(3)
        assert abs(bessel_moment(4, 1, PREC).value - z * 7 / 8) < tol(40)
        assert abs(bessel_moment(4, 3, PREC).value - (z * 7 / 32 - mpmath.mpf(3) / 16)) < tol(40)


def test_moment_against_general_purpose_quadrature():
    with mpmath.workdps(25):
        ref = mpmath.quad(lambda x: x**2 * mpmath.besselk(0, x) ** 3, [0, 1, 5, mpmath.inf])
        assert abs(bessel_moment(3, 2, 20).value - ref) < tol(18)


def test_moment_rejects_bad_indices():
    with pytest.raises(ValueError):
        bessel_moment(0, 1)
    with pytest.raises(ValueError):
        bessel_moment(2, -1)


def test_level_doubling_stays_within_error_bound():
    a = bessel_moment(4, 1, 30, QuadratureSpec(level=3))
    b = bessel_moment(4, 1, 30, QuadratureSpec(level=4))
    assert abs(a.value - b.value) <= max(a.error_bound, b.error_bound)


def test_results_are_reproducible():
    a = bessel_moment(5, 3, 30)
    b = bessel_moment(5, 3, 30, QuadratureSpec())
    assert a.value == b.value and str(a) == str(b)


def test_zeta3_against_two_oracles():
    z = zeta3(PREC)
    with mpmath.workdps(PREC + 10):
        assert abs(z.value - mpmath.zeta(3)) < tol(PREC)
        assert abs(z.value - zeta3_amdeberhan_zeilberger(PREC)) < tol(PREC)
    assert zeta3(15).digits(15) == "1.20205690315959"
    assert zeta3(1).digits() == "1."
    with pytest.raises(ValueError):
        zeta3(0)


def test_moment_recurrence_m4_odd():
    res = verify_moment_recurrence(4, 7, PREC, parity=1)
    assert set(res["residuals"]) == {1, 3}
    assert res["max"] < tol(PREC - 8)


def test_moment_recurrence_m5_from_k1():
    res = verify_moment_recurrence(5, 7, PREC, parity=1)
    assert set(res["residuals"]) == {1}
    assert res["max"] < tol(PREC - 8)


def test_moment_recurrence_m6_even():
    res = verify_moment_recurrence(6, 6, PREC, parity=0)
    assert set(res["residuals"]) == {0}
    assert res["max"] < tol(PREC - 8)
