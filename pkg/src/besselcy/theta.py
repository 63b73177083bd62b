"""Exact polynomials in theta and theta-operators in normal form.

A theta-operator is a finite sum ``sum_j x^j * P_j(theta)`` with
``theta = x d/dx`` and every power of x written to the left of the
theta-polynomial.  The only commutation rule needed is

    theta * x^j = x^j * (theta + j)

All coefficients are :class:`fractions.Fraction`; every object is immutable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

RationalLike = int | Fraction | str


def as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class ThetaPoly:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    @classmethod
    def constant(cls, c: RationalLike) -> "ThetaPoly":
        return cls((c,))

    @classmethod
    def theta(cls) -> "ThetaPoly":
        return cls((0, 1))

    @classmethod
    def linear(cls, slope: RationalLike, intercept: RationalLike) -> "ThetaPoly":
        return cls((intercept, slope))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ThetaPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == ThetaPoly.constant(other)._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"ThetaPoly({format_poly(self, 'theta')!r})"

    def __neg__(self) -> "ThetaPoly":
        return ThetaPoly(-c for c in self._coeffs)

    def __add__(self, other: "ThetaPoly | RationalLike") -> "ThetaPoly":
        other = _lift(other)
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        return ThetaPoly([u + v for u, v in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __sub__(self, other: "ThetaPoly | RationalLike") -> "ThetaPoly":
        return self + (-_lift(other))

    def __rsub__(self, other: RationalLike) -> "ThetaPoly":
        return _lift(other) - self

    def __mul__(self, other: "ThetaPoly | RationalLike") -> "ThetaPoly":
        if not isinstance(other, ThetaPoly):
            c = as_fraction(other)
            return ThetaPoly(c * a for a in self._coeffs)
        if not self._coeffs or not other._coeffs:
            return ThetaPoly()
        out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a:
                for j, b in enumerate(other._coeffs):
                    out[i + j] += a * b
        return ThetaPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "ThetaPoly":
        if e < 0:
            raise ValueError("negative exponent")
        result = ThetaPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __call__(self, value: RationalLike) -> Fraction:
        v = as_fraction(value)
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * v + c
        return acc

    def evaluate(self, value):
        """Horner evaluation at any ring element (ints, mpf, ...)."""
        acc = 0
        for c in reversed(self._coeffs):
            acc = acc * value + c
        return acc

    def compose(self, inner: "ThetaPoly") -> "ThetaPoly":
        """Return ``self(inner(theta))``."""
        acc = ThetaPoly()
        for c in reversed(self._coeffs):
            acc = acc * inner + ThetaPoly.constant(c)
        return acc

    def substitute_affine(self, s: RationalLike, r: RationalLike) -> "ThetaPoly":
        """Return ``self(s*theta + r)``."""
        return self.compose(ThetaPoly.linear(s, r))

    def shift(self, r: RationalLike) -> "ThetaPoly":
        return self.substitute_affine(1, r)

    def divmod(self, other: "ThetaPoly") -> tuple["ThetaPoly", "ThetaPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - dq - 1, -1, -1):
            q = rem[i + dq] / lead
            quot[i] = q
            if q:
                for k, b in enumerate(other._coeffs):
                    rem[i + k] -= q * b
        return ThetaPoly(quot), ThetaPoly(rem[:dq])

    def __floordiv__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "ThetaPoly") -> "ThetaPoly":
        return self.divmod(other)[1]

    def monic(self) -> "ThetaPoly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def gcd(self, other: "ThetaPoly") -> "ThetaPoly":
        """Monic greatest common divisor (zero if both are zero)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def content_scale(self) -> Fraction:
        """Positive factor making the coefficients coprime integers."""
        return _content_scale(self._coeffs)


def _lift(value: "ThetaPoly | RationalLike") -> ThetaPoly:
    return value if isinstance(value, ThetaPoly) else ThetaPoly.constant(value)


def _content_scale(values: Iterable[Fraction]) -> Fraction:
    values = [v for v in values if v]
    if not values:
        return Fraction(1)
    den = reduce(lcm, (v.denominator for v in values), 1)
    num = reduce(gcd, (abs(v.numerator * (den // v.denominator)) for v in values), 0)
    return Fraction(den, num)


THETA = ThetaPoly.theta()
ONE = ThetaPoly.constant(1)


class ThetaOperator:
    """``sum_j x^j P_j(theta)`` with x-powers on the left.

    ``terms`` maps the x-exponent j to the nonzero :class:`ThetaPoly` ``P_j``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, ThetaPoly] | Iterable[tuple[int, ThetaPoly]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, ThetaPoly] = {}
        for j, p in items:
            if j < 0:
                raise ValueError(f"negative x-exponent {j}")
            p = _lift(p)
            acc[j] = acc[j] + p if j in acc else p
        self._terms = tuple(sorted((j, p) for j, p in acc.items() if not p.is_zero()))

    @classmethod
    def from_poly(cls, p: ThetaPoly | RationalLike, j: int = 0) -> "ThetaOperator":
        return cls({j: _lift(p)})

    @property
    def terms(self) -> dict[int, ThetaPoly]:
        return dict(self._terms)

    def __getitem__(self, j: int) -> ThetaPoly:
        return dict(self._terms).get(j, ThetaPoly())

    @property
    def x_degree(self) -> int:
        """Largest x-exponent; -1 for the zero operator."""
        return self._terms[-1][0] if self._terms else -1

    @property
    def x_valuation(self) -> int:
        return self._terms[0][0] if self._terms else -1

    @property
    def order(self) -> int:
        """Order as a differential operator (max theta-degree)."""
        return max((p.degree for _, p in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_even(self) -> bool:
        return all(j % 2 == 0 for j, _ in self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThetaOperator):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __repr__(self) -> str:
        return f"ThetaOperator({format_operator(self)!r})"

    def __str__(self) -> str:
        return format_operator(self)

    def __add__(self, other: "ThetaOperator") -> "ThetaOperator":
        return add(self, other)

    def __neg__(self) -> "ThetaOperator":
        return ThetaOperator((j, -p) for j, p in self._terms)

    def __sub__(self, other: "ThetaOperator") -> "ThetaOperator":
        return add(self, -other)

    def scale(self, c: RationalLike) -> "ThetaOperator":
        c = as_fraction(c)
        return ThetaOperator((j, p * c) for j, p in self._terms)

    def map_polys(self, fn) -> "ThetaOperator":
        return ThetaOperator((j, fn(j, p)) for j, p in self._terms)


def add(a: ThetaOperator, b: ThetaOperator) -> ThetaOperator:
    return ThetaOperator(list(a.terms.items()) + list(b.terms.items()))


def mul_x(a: ThetaOperator, j: int) -> ThetaOperator:
    if j < 0:
        raise ValueError("x-power must be non-negative")
    return ThetaOperator((i + j, p) for i, p in a.terms.items())


def compose_theta_left(a: ThetaOperator) -> ThetaOperator:
    """theta o a, using theta * x^j = x^j * (theta + j)."""
    return a.map_polys(lambda j, p: ThetaPoly.linear(1, j) * p)


def substitute_theta_affine(a: ThetaOperator, s: RationalLike, r: RationalLike) -> ThetaOperator:
    return a.map_polys(lambda j, p: p.substitute_affine(s, r))


def scale_x(a: ThetaOperator, c: RationalLike) -> ThetaOperator:
    """Substitute x -> c*x; theta is unchanged."""
    c = as_fraction(c)
    if c == 0:
        raise ValueError("scale_x needs a nonzero factor")
    return a.map_polys(lambda j, p: p * c**j)


def normalize(a: ThetaOperator) -> ThetaOperator:
    """Integer coefficients with content 1; lowest x-term has positive leading coefficient."""
    if a.is_zero():
        return a
    terms = a.terms
    scale = _content_scale(c for p in terms.values() for c in p.coeffs)
    if terms[a.x_valuation].leading < 0:
        scale = -scale
    return a.scale(scale)


def mirror_at_infinity(a: ThetaOperator, c: RationalLike) -> ThetaOperator:
    """Move the expansion point to infinity: x -> 1/(c x), theta -> -theta - 1.

    ``x^j P_j(theta)`` becomes ``x^(d-j) c^(-j) P_j(-theta-1)`` with ``d`` the
    x-degree (the global factor ``x^-d`` is dropped).  If ``a`` kills ``f(x)``
    the result kills ``x^-1 f(1/(c x))``.
    """
    c = as_fraction(c)
    if c == 0:
        raise ValueError("mirror_at_infinity needs a nonzero scale")
    if a.is_zero():
        return a
    d = a.x_degree
    out = ThetaOperator((d - j, p.substitute_affine(-1, -1) * c ** (-j)) for j, p in a.terms.items())
    return normalize(out)


def remove_left_theta_factor(a: ThetaOperator) -> tuple[ThetaOperator, ThetaPoly]:
    """Split ``a = g(theta) * b`` with ``g`` the largest common left theta-factor.

    Since ``g(theta) x^j = x^j g(theta + j)``, ``g`` is the monic gcd of the
    shifted polynomials ``P_j(theta - j)``.
    """
    if a.is_zero():
        return a, ONE
    g = reduce(lambda u, v: u.gcd(v), (p.shift(-j) for j, p in a.terms.items()))
    if g.degree <= 0:
        return a, ONE
    return a.map_polys(lambda j, p: p // g.shift(j)), g


def apply_to_series(a: ThetaOperator, coeffs: Sequence, n_terms: int | None = None) -> list:
    """First ``n_terms`` coefficients of ``a`` applied to ``sum c_n x^n``.

    ``x^j P_j(theta)`` sends ``c_n x^n`` to ``P_j(n) c_n x^(n+j)``.  Works for
    any coefficient ring supporting + and * with Fractions (Fraction, mpf).
    """
    n_terms = len(coeffs) if n_terms is None else n_terms
    if len(coeffs) < n_terms:
        raise ValueError(f"need {n_terms} coefficients, got {len(coeffs)}")
    out = [Fraction(0)] * n_terms
    for j, p in a.terms.items():
        for n in range(max(n_terms - j, 0)):
            out[n + j] += p(n) * coeffs[n]
    return out


def apply_to_shifted_series(a: ThetaOperator, coeffs: Sequence, offset: int) -> dict[int, object]:
    """Apply ``a`` to ``sum_n c_n x^(n + offset)``; returns exponent -> coefficient.

    Only exponents fully determined by the given prefix are returned.
    """
    n_terms = len(coeffs)
    out: dict[int, object] = {}
    top = offset + n_terms
    for j, p in a.terms.items():
        for n in range(n_terms):
            e = n + offset + j
            if e >= top:
                break
            out[e] = out.get(e, 0) + p(n + offset) * coeffs[n]
    return out


# ---------------------------------------------------------------------------
# text and JSON forms


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial(c: Fraction, factors: list[str], first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if factors:
        body = "*".join(factors) if mag == 1 else "*".join([format_rational(mag)] + factors)
    else:
        body = format_rational(mag)
    if first:
        return body if sign == "+" else f"-{body}"
    return f" {sign} {body}"


def _power(var: str, e: int) -> list[str]:
    if e == 0:
        return []
    return [var] if e == 1 else [f"{var}^{e}"]


def format_poly(p: ThetaPoly, var: str = "theta") -> str:
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c:
            parts.append(_monomial(c, _power(var, i), not parts))
    return "".join(parts) or "0"


def format_operator(a: ThetaOperator, xvar: str = "x", tvar: str = "theta") -> str:
    """Expanded text form: ``c*x^j*theta^i`` monomials, by x-power then descending theta-power."""
    parts = []
    for j, p in a.terms.items():
        for i in range(p.degree, -1, -1):
            c = p.coeffs[i]
            if c:
                parts.append(_monomial(c, _power(xvar, j) + _power(tvar, i), not parts))
    return "".join(parts) or "0"


def parse_operator(text: str, xvar: str = "x", tvar: str = "theta") -> ThetaOperator:
    """Parse the text form.

    Accepts the expanded monomial grammar produced by :func:`format_operator`
    and, as a convenience, products and integer powers of parenthesized
    factors (``x^2*(theta+1)^3``).  Every product is read in normal form:
    x-powers act to the left of the theta-polynomial.
    """
    coeffs = _parse_bivariate(text, xvar, tvar)
    terms: dict[int, dict[int, Fraction]] = {}
    for (j, i), c in coeffs.items():
        terms.setdefault(j, {})[i] = c
    return ThetaOperator(
        (j, ThetaPoly(d.get(i, 0) for i in range(max(d) + 1))) for j, d in terms.items()
    )


def parse_poly(text: str, var: str = "theta") -> ThetaPoly:
    op = parse_operator(text, xvar="__unused_x", tvar=var)
    if op.x_degree > 0:
        raise ValueError("unexpected x in polynomial")
    return op[0]


def _parse_bivariate(text: str, xvar: str, tvar: str) -> dict[tuple[int, int], Fraction]:
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    x, t = sympy.symbols(f"{xvar} {tvar}")
    try:
        expr = parse_expr(
            text,
            local_dict={xvar: x, tvar: t},
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise ValueError(f"cannot parse {text!r}: {exc}") from None
    extra = expr.free_symbols - {x, t}
    if extra:
        raise ValueError(f"unknown symbols in operator text: {sorted(map(str, extra))}")
    try:
        poly = sympy.Poly(expr, x, t, domain="QQ")
    except sympy.PolynomialError as exc:
        raise ValueError(f"not a polynomial in {xvar}, {tvar}: {exc}") from None
    return {
        (int(j), int(i)): Fraction(int(c.p), int(c.q)) for (j, i), c in poly.terms() if c != 0
    }


def operator_to_json(a: ThetaOperator) -> dict:
    return {
        "terms": [
            {"j": j, "poly": [format_rational(c) for c in p.coeffs]} for j, p in a.terms.items()
        ]
    }


def operator_from_json(data: dict | str) -> ThetaOperator:
    if isinstance(data, str):
        data = json.loads(data)
    return ThetaOperator((int(t["j"]), ThetaPoly(Fraction(c) for c in t["poly"])) for t in data["terms"])
