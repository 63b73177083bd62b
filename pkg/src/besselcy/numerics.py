"""High-precision K0, Bessel moments and zeta(3).

K0 comes straight from ``K0(x) = int_0^oo exp(-x cosh t) dt``.  That
integrand already decays double exponentially, so the trapezoid rule with
step ``h = 2**-level`` converges geometrically in ``1/h``.  Moments
``c_(m,k) = int_0^oo x^k K0(x)^m dx`` use the exp-sinh map
``x = exp(pi/2 sinh t)``.  Successive levels reuse every earlier node.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath

GUARD_DIGITS = 10
MAX_LEVEL = 12
DEFAULT_PREC = 50


class PrecisionNotReached(ArithmeticError):
    pass


@dataclass(frozen=True)
class BigReal:
    """A value known to ``prec`` digits, with an absolute error estimate."""

    value: mpmath.mpf
    prec: int
    error_bound: mpmath.mpf

    def __str__(self) -> str:
        return f"{self.digits()} +- {mpmath.nstr(self.error_bound, 3)}"

    def digits(self, n: int | None = None) -> str:
        return mpmath.nstr(self.value, n or self.prec, strip_zeros=False)

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class QuadratureSpec:
    """Double-exponential trapezoid settings; ``h = 2**-level``."""

    level: int = 3
    max_level: int = MAX_LEVEL

    def __post_init__(self):
        if not 0 <= self.level <= self.max_level <= MAX_LEVEL:
            raise ValueError(f"levels must satisfy 0 <= level <= max_level <= {MAX_LEVEL}")


def _trapezoid_levels(phi, t_lo, t_hi, eps, spec: QuadratureSpec, quadratic: bool):
    """Nested trapezoid sums of ``phi`` over [t_lo, t_hi], beyond which phi is negligible.

    Returns ``(value, error_estimate, level)``.  With ``quadratic`` the error
    of the finer level is taken as the squared relative change (the digit
    count doubles per level); otherwise the change itself is the estimate.
    """
    h = mpmath.mpf(2) ** -spec.level
    k_lo = int(mpmath.floor(t_lo / h))
    k_hi = int(mpmath.ceil(t_hi / h))
    total = mpmath.fsum(phi(k * h) for k in range(k_lo, k_hi + 1))
    value = total * h
    prev = None
    level = spec.level
    while True:
        if prev is not None:
            diff = abs(value - prev)
            scale = max(abs(value), mpmath.mpf(1))
            err = diff * min(diff / scale, 1) if quadratic else diff
            if err <= eps * scale:
                return value, max(err, eps * scale), level
        if level >= spec.max_level:
            raise PrecisionNotReached(f"quadrature did not converge by level {level}")
        level += 1
        h /= 2
        k_lo, k_hi = 2 * k_lo, 2 * k_hi
        total += mpmath.fsum(phi(k * h) for k in range(k_lo + 1, k_hi, 2))
        prev, value = value, total * h


def _k0_cutoff(x, wp):
    # exp(-x cosh t) < 10^-wp once x cosh t > wp ln 10
    target = (wp + 5) * mpmath.ln(10) / x
    return mpmath.acosh(max(target, mpmath.mpf(1))) + 1


def bessel_K0(x, prec: int = DEFAULT_PREC, spec: QuadratureSpec | None = None) -> BigReal:
    """K0(x) for x > 0 from the cosh integral."""
    spec = spec or QuadratureSpec()
    wp = prec + GUARD_DIGITS
    with mpmath.workdps(wp):
        x = mpmath.mpf(x)
        if x <= 0:
            raise ValueError("K0 needs x > 0")
        value, err = _k0_at(x, wp, spec)
    return BigReal(value, prec, err)


def _k0_at(x, wp, spec):
    t_max = _k0_cutoff(x, wp)
    eps = mpmath.mpf(10) ** -wp
    # even integrand: sum over t >= 0 with half weight at t = 0
    def phi(t):
        v = mpmath.exp(-x * mpmath.cosh(t))
        return v / 2 if t == 0 else v

    return _trapezoid_levels(phi, 0, t_max, eps, spec, quadratic=True)[:2]


class _K0Grid:
    """K0 values at exp-sinh nodes, shared by every moment at one precision."""

    def __init__(self, wp: int, spec: QuadratureSpec):
        self.wp = wp
        self.spec = spec
        self.cache: dict = {}

    def __call__(self, t):
        hit = self.cache.get(t)
        if hit is None:
            x = mpmath.exp(mpmath.pi / 2 * mpmath.sinh(t))
            hit = (x, _k0_at(x, self.wp, self.spec)[0])
            self.cache[t] = hit
        return hit


@lru_cache(maxsize=8)
def _grid(wp: int, spec: QuadratureSpec) -> _K0Grid:
    return _K0Grid(wp, spec)


def bessel_moment(m: int, k: int, prec: int = DEFAULT_PREC, spec: QuadratureSpec | None = None) -> BigReal:
    """``c_(m,k) = int_0^oo x^k K0(x)^m dx``."""
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    spec = spec or QuadratureSpec()
    wp = prec + GUARD_DIGITS
    with mpmath.workdps(wp):
        grid = _grid(wp, spec)
        eps = mpmath.mpf(10) ** -(prec + 2)
        ln_eps = wp * mpmath.ln(10)
        half_pi = mpmath.pi / 2
        # left end: x^(k+1) |ln x|^m below eps; right end: exp(-m x) below eps
        t_lo = -mpmath.asinh((ln_eps + 3 * m * mpmath.ln(ln_eps)) / ((k + 1) * half_pi))
        t_hi = mpmath.asinh(mpmath.ln((ln_eps + 40) / m + 1) / half_pi) + mpmath.mpf(1) / 4

        def phi(t):
            x, k0 = grid(t)
            return x ** (k + 1) * k0**m * half_pi * mpmath.cosh(t)

        value, err, _ = _trapezoid_levels(phi, t_lo, t_hi, eps, spec, quadratic=False)
    return BigReal(value, prec, err)


def zeta3(prec: int = DEFAULT_PREC) -> BigReal:
    """zeta(3) from ``5/2 sum (-1)^(n+1) / (n^3 C(2n,n))``.

    The series alternates with decreasing terms, so the first omitted term
    bounds the error; the term ratio tends to -1/4.
    """
    if prec < 1:
        raise ValueError("prec must be positive")
    wp = prec + GUARD_DIGITS
    with mpmath.workdps(wp):
        eps = mpmath.mpf(10) ** -wp
        total = mpmath.mpf(0)
        central = mpmath.mpf(1)  # C(2n, n)
        n = 1
        while True:
            central = central * (4 * n - 2) / n
            term = 1 / (mpmath.mpf(n) ** 3 * central)
            if term < eps:
                break
            total += term if n % 2 else -term
            n += 1
        value = total * 5 / 2
        err = 5 * term / 2 + eps
    return BigReal(value, prec, err)


def verify_moment_recurrence(m: int, k_max: int, prec: int = DEFAULT_PREC, parity: int | None = None,
                             spec: QuadratureSpec | None = None) -> dict:
    """Evaluate the moment recurrence of ``K0^m`` on quadrature moments.

    Returns ``{"residuals": {k: relative residual}, "max": worst}``.  With
    ``parity`` set only starting points ``k`` of that parity are used.
    """
    from .annihilator import bessel_k_power
    from .sequences import moment_recurrence

    rec = moment_recurrence(bessel_k_power(m))
    forward = rec.forward()
    span = rec.order * rec.step
    residuals = {}
    moments: dict[int, BigReal] = {}
    with mpmath.workdps(prec + GUARD_DIGITS):
        for k in range(0, k_max - span + 1):
            if parity is not None and k % 2 != parity:
                continue
            terms = []
            for i, q in enumerate(forward):
                idx = k + i * rec.step
                if idx not in moments:
                    moments[idx] = bessel_moment(m, idx, prec, spec)
                terms.append(q.evaluate(k) * moments[idx].value)
            scale = max(abs(t) for t in terms)
            residuals[k] = abs(mpmath.fsum(terms)) / scale
    worst = max(residuals.values()) if residuals else mpmath.mpf(0)
    return {"residuals": residuals, "max": worst, "moments": moments}
