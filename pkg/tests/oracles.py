"""Reference values computed independently of the package under test."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial

import mpmath


def k0_series(x, dps: int):
    """K0 from the small-x expansion with the logarithm term.

    K0(x) = -(ln(x/2) + gamma) I0(x) + sum_k (x^2/4)^k / k!^2 * H_k
    """
    with mpmath.workdps(dps + 20):
        x = mpmath.mpf(x)
        q = x * x / 4
        term = mpmath.mpf(1)
        i0 = mpmath.mpf(0)
        tail = mpmath.mpf(0)
        harmonic = mpmath.mpf(0)
        k = 0
        eps = mpmath.mpf(10) ** -(dps + 15)
        while True:
            i0 += term
            tail += term * harmonic
            k += 1
            term = term * q / (k * k)
            harmonic += mpmath.mpf(1) / k
            if term < eps and k > 5:
                break
        return +(-(mpmath.log(x / 2) + mpmath.euler) * i0 + tail)


def zeta3_amdeberhan_zeilberger(dps: int):
    """zeta(3) = 1/2 sum (-1)^(n+1) (205 n^2 - 160 n + 32) / (n^5 C(2n,n)^5)."""
    with mpmath.workdps(dps + 10):
        total = mpmath.mpf(0)
        n = 1
        while True:
            t = mpmath.mpf(205 * n * n - 160 * n + 32) / (mpmath.mpf(n) ** 5 * mpmath.mpf(comb(2 * n, n)) ** 5)
            if t < mpmath.mpf(10) ** -(dps + 8):
                break
            total += t if n % 2 else -t
            n += 1
        return +(total / 2)


def multinomial_square_sum(m: int, n: int) -> int:
    """Sum over compositions i_1 + ... + i_m = n of (n! / prod i_j!)^2, by enumeration."""
    total = 0
    for parts in product(range(n + 1), repeat=m - 1):
        last = n - sum(parts)
        if last < 0:
            continue
        denom = 1
        for i in (*parts, last):
            denom *= factorial(i)
        total += (factorial(n) // denom) ** 2
    return total


def i0_power_coefficients(m: int, n_terms: int) -> list[Fraction]:
    """Coefficients of I0(x)^m by direct multiplication of truncated power series."""
    base = [Fraction(0)] * n_terms
    for k in range(0, n_terms, 2):
        base[k] = Fraction(1, 4 ** (k // 2) * factorial(k // 2) ** 2)
    out = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
    for _ in range(m):
        out = [sum(out[i] * base[n - i] for i in range(n + 1)) for n in range(n_terms)]
    return out
