"""Recurrences with polynomial coefficients and the sequences they define.

A :class:`Recurrence` stores ``sum_j c_j(n) d_(n - j*step) = 0``.  The
operator ``sum_j x^j P_j(theta)`` corresponds to ``c_j(n) = P_j(n - j)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, factorial
from typing import Iterable, Sequence

import mpmath

from .numerics import BigReal
from .theta import (
    ThetaOperator,
    ThetaPoly,
    _content_scale,
    as_fraction,
    format_poly,
    format_rational,
    normalize,
)


class SingularLeadingCoefficient(ArithmeticError):
    def __init__(self, n: int):
        super().__init__(f"leading coefficient vanishes at n = {n}; supply more initial values")
        self.n = n


class NonPositiveValues(ValueError):
    pass


class Recurrence:
    """``sum_{j=0}^{order} c_j(n) d_(n - j*step) = 0``."""

    __slots__ = ("step", "_coeffs")

    def __init__(self, coeffs: Iterable[ThetaPoly], step: int = 1):
        if step not in (1, 2):
            raise ValueError("step must be 1 or 2")
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        lead = 0
        while lead < len(cs) and cs[lead].is_zero():
            lead += 1
        if lead == len(cs):
            raise ValueError("recurrence has no nonzero coefficient")
        # re-index so that c_0 != 0: drop leading zero shifts
        cs = [c.shift(lead * step) for c in cs[lead:]]
        self.step = step
        self._coeffs = tuple(cs)

    @classmethod
    def from_forward(cls, polys: Sequence[ThetaPoly], step: int = 1) -> "Recurrence":
        """From ``sum_i q_i(k) d_(k + i*step) = 0`` (the way recursions are usually printed)."""
        top = (len(polys) - 1) * step
        return cls([polys[len(polys) - 1 - j].shift(-top) for j in range(len(polys))], step)

    @property
    def coeffs(self) -> tuple[ThetaPoly, ...]:
        return self._coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    def forward(self) -> list[ThetaPoly]:
        """Coefficients ``q_i(k)`` of ``d_(k + i*step)``, i = 0..order."""
        top = self.order * self.step
        return [self._coeffs[self.order - i].shift(top) for i in range(self.order + 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Recurrence):
            return NotImplemented
        return self.step == other.step and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.step, self._coeffs))

    def __repr__(self) -> str:
        return f"Recurrence({format_recurrence(self)!r}, step={self.step})"

    def normalize(self) -> "Recurrence":
        scale = _content_scale(c for p in self._coeffs for c in p.coeffs)
        if self._coeffs[0].leading < 0:
            scale = -scale
        return Recurrence((p * scale for p in self._coeffs), self.step)

    def common_factor(self) -> ThetaPoly:
        return reduce(lambda a, b: a.gcd(b), self._coeffs)

    def reduce(self) -> "Recurrence":
        """Divide out the monic gcd of all coefficients, then normalize."""
        g = self.common_factor()
        if g.degree <= 0:
            return self.normalize()
        return Recurrence((p // g for p in self._coeffs), self.step).normalize()

    def sublattice(self, parity: int) -> "Recurrence":
        """Step-1 recurrence for ``e_n = d_(2n + parity)`` of a step-2 recurrence."""
        if self.step != 2:
            raise ValueError("sublattice needs a step-2 recurrence")
        if parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        sub = ThetaPoly.linear(2, parity)
        return Recurrence((p.compose(sub) for p in self._coeffs), 1)

    def rescale(self, num: ThetaPoly, den: ThetaPoly) -> "Recurrence":
        """Recurrence for ``f_n = h(n) d_n`` where ``h(n)/h(n-1) = num(n)/den(n)``.

        Coefficient j gains ``prod_{i<j} num(n-i) * prod_{j<=i<J} den(n-i)``.
        """
        if self.step != 1:
            raise ValueError("rescale needs a step-1 recurrence")
        order = self.order
        out = []
        for j, c in enumerate(self._coeffs):
            w = c
            for i in range(j):
                w = w * num.shift(-i)
            for i in range(j, order):
                w = w * den.shift(-i)
            out.append(w)
        return Recurrence(out, 1)

    def residuals(self, values: Sequence, start: int | None = None) -> list:
        """``sum_j c_j(n) d_(n - j*step)`` for each n whose terms are all available."""
        span = self.order * self.step
        start = span if start is None else start
        out = []
        for n in range(start, len(values)):
            acc = 0
            for j, c in enumerate(self._coeffs):
                idx = n - j * self.step
                if idx >= 0:
                    acc = acc + c.evaluate(n) * values[idx]
            out.append(acc)
        return out


def operator_to_recurrence(a: ThetaOperator) -> Recurrence:
    if a.is_zero():
        raise ValueError("zero operator has no recurrence")
    terms = a.terms
    return Recurrence(
        (terms[j].shift(-j) if j in terms else ThetaPoly() for j in range(a.x_degree + 1)), 1
    ).normalize()


def recurrence_to_operator(r: Recurrence) -> ThetaOperator:
    if r.step != 1:
        raise ValueError("only step-1 recurrences have a theta-operator form")
    return normalize(ThetaOperator((j, c.shift(j)) for j, c in enumerate(r.coeffs)))


def moment_recurrence(t: ThetaOperator) -> Recurrence:
    """``sum_j P_j(-k-1-2j) c_(k+2j) = 0`` from ``T = sum_j x^(2j) P_j(theta)``.

    Integrating ``x^k T(f)`` over (0, oo) by parts sends ``theta`` to
    ``-(k + 2j + 1)`` on the ``x^(2j)`` term.
    """
    if not t.is_even():
        raise ValueError("moment recurrence needs an operator even in x")
    terms = t.terms
    forward = [
        terms[2 * j].substitute_affine(-1, -1 - 2 * j) if 2 * j in terms else ThetaPoly()
        for j in range(t.x_degree // 2 + 1)
    ]
    return Recurrence.from_forward(forward, step=2).normalize()


def moment_subsequence_recurrence(t: ThetaOperator, parity: int) -> Recurrence:
    """Step-1 recurrence for ``e_n = c_(2n + parity)``."""
    return moment_recurrence(t).sublattice(parity).normalize()


def gamma_rescale_recurrence(t: ThetaOperator, r) -> Recurrence:
    """Recurrence for ``d_n = r^(2n) / n!^2 * c_(2n+1)``."""
    r = as_fraction(r)
    if r == 0:
        raise ValueError("r must be nonzero")
    odd = moment_subsequence_recurrence(t, 1)
    return odd.rescale(ThetaPoly.constant(r * r), ThetaPoly((0, 0, 1))).reduce()


def gamma_rescale_ode(t: ThetaOperator, r) -> ThetaOperator:
    """Operator annihilating ``sum_n r^(2n)/n!^2 c_(m,2n+1) x^n`` (up to a polynomial)."""
    return recurrence_to_operator(gamma_rescale_recurrence(t, r))


def factorial_square_rescale(s: ThetaOperator) -> ThetaOperator:
    """From an annihilator of ``sum a_n x^n`` to one of ``sum n!^2 a_n x^n``."""
    rec = operator_to_recurrence(s).rescale(ThetaPoly((0, 0, 1)), ThetaPoly.constant(1)).reduce()
    return recurrence_to_operator(rec)


# ---------------------------------------------------------------------------
# sequence tables


@dataclass(frozen=True)
class SequenceTable:
    values: tuple
    provenance: str = "solved"

    def __post_init__(self):
        if self.provenance not in ("solved", "convolution", "closed-form"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def to_text(self) -> str:
        return "".join(f"{n}\t{format_rational(v)}\n" for n, v in enumerate(self.values))

    @classmethod
    def from_text(cls, text: str, provenance: str = "solved") -> "SequenceTable":
        vals = []
        for line in text.splitlines():
            if not line.strip():
                continue
            n, v = line.split("\t")
            if int(n) != len(vals):
                raise ValueError(f"expected index {len(vals)}, got {n}")
            vals.append(Fraction(v))
        return cls(tuple(vals), provenance)

    def to_json(self) -> str:
        return json.dumps([format_rational(v) for v in self.values])

    @classmethod
    def from_json(cls, text: str, provenance: str = "solved") -> "SequenceTable":
        return cls(tuple(Fraction(v) for v in json.loads(text)), provenance)


def solve_series(r: Recurrence, init: Sequence, n_max: int) -> SequenceTable:
    """Values ``d_0 .. d_n_max`` from the initial values, solving forward exactly."""
    if r.step != 1:
        raise ValueError("solve_series needs a step-1 recurrence")
    if len(init) < r.order:
        raise ValueError(f"need at least {r.order} initial values")
    vals = [as_fraction(v) for v in init[: n_max + 1]]
    c0 = r.coeffs[0]
    rest = list(enumerate(r.coeffs))[1:]
    for n in range(len(vals), n_max + 1):
        lead = c0(n)
        if lead == 0:
            raise SingularLeadingCoefficient(n)
        acc = Fraction(0)
        for j, c in rest:
            if n - j >= 0:
                acc += c(n) * vals[n - j]
        vals.append(-acc / lead)
    return SequenceTable(tuple(vals), "solved")


def _verrill_integers(m: int, n_max: int) -> list[int]:
    # n!^2 * (a * b)_n = sum_k C(n,k)^2 (k!^2 a_k) ((n-k)!^2 b_(n-k)): the same
    # convolution carried out on the integers A_n = n!^2 a_n
    if m < 1:
        raise ValueError("m must be at least 1")
    binsq = [[comb(n, k) ** 2 for k in range(n + 1)] for n in range(n_max + 1)]
    out = [1] * (n_max + 1)
    for _ in range(m - 1):
        out = [sum(row[k] * out[k] for k in range(n + 1)) for n, row in enumerate(binsq)]
    return out


def inverse_factorial_squares_power(m: int, n_max: int) -> list[Fraction]:
    """``a_n^(m)``: coefficients of ``(sum x^n / n!^2)^m``."""
    return [Fraction(v, factorial(n) ** 2) for n, v in enumerate(_verrill_integers(m, n_max))]


def verrill_coefficients(m: int, n_max: int) -> SequenceTable:
    """``A_n^(m) = n!^2 a_n^(m)``, the sum of squared multinomials over compositions of n into m parts."""
    return SequenceTable(tuple(_verrill_integers(m, n_max)), "convolution")


def binomial_sum_4(n: int) -> int:
    """``sum_k C(n,k)^2 C(2k,k) C(2n-2k,n-k)`` (equals ``A_n^(4)``)."""
    return sum(comb(n, k) ** 2 * comb(2 * k, k) * comb(2 * n - 2 * k, n - k) for k in range(n + 1))


# ---------------------------------------------------------------------------
# limits and asymptotics


def apery_limit(r: Recurrence, init_a: Sequence, init_b: Sequence, n: int, prec: int = 30) -> BigReal:
    """``B_n / A_n`` with the change from ``B_(n-1)/A_(n-1)`` as error estimate."""
    a = solve_series(r, init_a, n).values
    b = solve_series(r, init_b, n).values
    with mpmath.workdps(prec + 10):
        last = _ratio(b[n], a[n])
        prev = _ratio(b[n - 1], a[n - 1])
        # below the working precision the change is rounding noise
        err = max(abs(last - prev), mpmath.mpf(10) ** -(prec + 8))
    return BigReal(last, prec, err)


def _ratio(p: Fraction, q: Fraction):
    f = p / q
    return mpmath.mpf(f.numerator) / f.denominator


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def richardson(seq: Sequence, n0: int):
    """Limit of ``s_n = s + a_1/n + a_2/n^2 + ...`` from ``s_n0 .. s_(n0+p)``."""
    p = len(seq) - 1
    total = mpmath.mpf(0)
    for k, s in enumerate(seq):
        total += s * mpmath.mpf(n0 + k) ** p * (-1) ** (k + p) / (factorial(k) * factorial(p - k))
    return total


@dataclass(frozen=True)
class AsymptoticFit:
    """``v_n ~ C n^b lambda^n``; ``residual`` is the worst relative misfit on the range."""

    growth: mpmath.mpf
    exponent: mpmath.mpf
    constant: mpmath.mpf
    residual: mpmath.mpf


def asymptotic_fit(values: Sequence, n_lo: int, n_hi: int, order: int = 6, dps: int = 60) -> AsymptoticFit:
    if n_hi - n_lo < 8:
        raise ValueError("need n_hi - n_lo >= 8")
    if n_hi >= len(values):
        raise ValueError("n_hi beyond the end of the table")
    order = min(order, n_hi - n_lo - 2)
    with mpmath.workdps(dps):
        v = {n: _to_mpf(values[n]) for n in range(n_lo, n_hi + 1)}
        if any(x <= 0 for x in v.values()):
            raise NonPositiveValues("asymptotic_fit needs positive values on the range")
        n0 = n_hi - 1 - order
        ratios = [v[n + 1] / v[n] for n in range(n0, n_hi)]
        lam = richardson(ratios, n0)
        log_lam = mpmath.log(lam)
        betas = [(mpmath.log(v[n + 1] / v[n]) - log_lam) / mpmath.log(1 + mpmath.mpf(1) / n)
                 for n in range(n0, n_hi)]
        b = richardson(betas, n0)
        consts = [v[n] / (lam**n * mpmath.mpf(n) ** b) for n in range(n0, n_hi)]
        c = richardson(consts, n0)
        residual = max(abs(v[n] / (c * lam**n * mpmath.mpf(n) ** b) - 1) for n in v)
    return AsymptoticFit(lam, b, c, residual)


# ---------------------------------------------------------------------------
# text forms


def format_recurrence(r: Recurrence, var: str = "n") -> str:
    parts = []
    for j, c in enumerate(r.coeffs):
        if c.is_zero():
            continue
        body = f"({format_poly(c, var)})*N^{j}"
        parts.append(body if not parts else f" + {body}")
    return "".join(parts)


def parse_recurrence(text: str, step: int = 1, var: str = "n") -> Recurrence:
    from .theta import _parse_bivariate

    coeffs = _parse_bivariate(text, "N", var)
    by_shift: dict[int, dict[int, Fraction]] = {}
    for (j, i), c in coeffs.items():
        by_shift.setdefault(j, {})[i] = c
    order = max(by_shift)
    return Recurrence(
        (ThetaPoly(by_shift.get(j, {}).get(i, 0) for i in range(max(by_shift.get(j, {0: 0})) + 1))
         for j in range(order + 1)),
        step,
    )


def recurrence_to_json(r: Recurrence) -> dict:
    return {"step": r.step, "coeffs": [[format_rational(c) for c in p.coeffs] for p in r.coeffs]}


def recurrence_from_json(data: dict | str) -> Recurrence:
    if isinstance(data, str):
        data = json.loads(data)
    return Recurrence((ThetaPoly(Fraction(c) for c in p) for p in data["coeffs"]), int(data["step"]))
