"""Command-line access to every stage of the pipeline.

Exit status: 0 on success, 1 when a verification fails, 2 on a usage error.
Verification commands print a single PASS/FAIL line before their report.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import fixtures, pipeline
from .annihilator import BaseEquation, bessel_k_power, sqrt_exp_power, symmetric_power
from .numerics import DEFAULT_PREC, MAX_LEVEL, PrecisionNotReached, QuadratureSpec, bessel_moment, zeta3
from .sequences import (
    SingularLeadingCoefficient,
    apery_limit,
    asymptotic_fit,
    factorial_square_rescale,
    format_recurrence,
    gamma_rescale_ode,
    gamma_rescale_recurrence,
    moment_recurrence,
    moment_subsequence_recurrence,
    recurrence_to_json,
    solve_series,
    verrill_coefficients,
)
from .theta import format_operator, format_rational, mirror_at_infinity, operator_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _default_r(m: int) -> Fraction:
    r = pipeline.PRINTED_SCALES.get(m)
    return Fraction(r[0]) if r else pipeline.VERRILL_SIDE_R


class Output:
    """Collects text lines or a JSON payload and prints them once."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def verdict(self, ok: bool, what: str) -> None:
        self.data["verdict"] = "PASS" if ok else "FAIL"
        self.lines.insert(0, f"{'PASS' if ok else 'FAIL'}: {what}")

    def emit(self) -> None:
        if self.fmt == "json":
            print(json.dumps(self.data, indent=2, sort_keys=True))
        else:
            print("\n".join(self.lines))


def _num(v, digits: int) -> str:
    return mpmath.nstr(v, digits, strip_zeros=False)


def _spec(args) -> QuadratureSpec | None:
    if getattr(args, "quad_level", None) is None:
        return None
    if not 0 <= args.quad_level <= MAX_LEVEL:
        raise UsageError(f"--quad-level must lie in [0, {MAX_LEVEL}]")
    return QuadratureSpec(level=args.quad_level)


# ---------------------------------------------------------------------------
# commands


def cmd_annihilator(args, out: Output) -> int:
    op = symmetric_power(BaseEquation.from_name(args.base), args.m)
    out.lines.append(format_operator(op))
    out.data["operator"] = operator_to_json(op)
    return EXIT_OK


def cmd_moment_rec(args, out: Output) -> int:
    t = bessel_k_power(args.m)
    if args.parity is None:
        rec = moment_recurrence(t)
        out.lines.append(format_recurrence(rec, "k"))
    else:
        rec = moment_subsequence_recurrence(t, args.parity)
        out.lines.append(format_recurrence(rec, "n"))
    out.data["recurrence"] = recurrence_to_json(rec)
    return EXIT_OK


def cmd_d_ode(args, out: Output) -> int:
    r = args.r if args.r is not None else _default_r(args.m)
    op = gamma_rescale_ode(bessel_k_power(args.m), r)
    rec = gamma_rescale_recurrence(bessel_k_power(args.m), r)
    out.lines += [format_operator(op), format_recurrence(rec)]
    out.data.update(r=format_rational(r), operator=operator_to_json(op), recurrence=recurrence_to_json(rec))
    return EXIT_OK


def cmd_mirror(args, out: Output) -> int:
    r = args.r if args.r is not None else _default_r(args.m)
    c = args.c if args.c is not None else (2 * r) ** 2
    if c == 0:
        raise UsageError("--c must be nonzero")
    op = mirror_at_infinity(gamma_rescale_ode(bessel_k_power(args.m), r), c)
    out.lines.append(format_operator(op))
    out.data.update(r=format_rational(r), c=format_rational(c), operator=operator_to_json(op))
    name = f"mirror_m{args.m}" if args.m != 4 else "d_ode_m4"
    if name not in fixtures.fixture_names():
        return EXIT_OK
    ok, found = fixtures.discrepancy_report(name, op)
    out.verdict(ok, f"mirror for m={args.m} against fixture {name}")
    for d in found:
        status = "confirmed" if d.confirmed else "not confirmed"
        out.lines.append(f"printed misprint ({d.kind}) in the x^{d.x_power} term: {d.printed} [{status}]")
    out.data["misprints"] = [d.__dict__ for d in found]
    return EXIT_OK if ok and all(d.confirmed for d in found) else EXIT_FAIL


def cmd_verrill(args, out: Output) -> int:
    table = verrill_coefficients(args.m, args.N)
    out.lines += [f"{n}\t{format_rational(v)}" for n, v in enumerate(table.values)]
    out.data["values"] = [format_rational(v) for v in table.values]
    return EXIT_OK


def cmd_verrill_ode(args, out: Output) -> int:
    op = factorial_square_rescale(sqrt_exp_power(args.m))
    out.lines.append(format_operator(op))
    out.data["operator"] = operator_to_json(op)
    return EXIT_OK


def cmd_solve(args, out: Output) -> int:
    r = args.r if args.r is not None else _default_r(args.m)
    rec = gamma_rescale_recurrence(bessel_k_power(args.m), r)
    if len(args.init) < rec.order:
        raise UsageError(f"--init needs at least {rec.order} values for this recurrence")
    table = solve_series(rec, args.init, args.N)
    out.lines += [f"{n}\t{format_rational(v)}" for n, v in enumerate(table.values)]
    out.data.update(recurrence=recurrence_to_json(rec), values=[format_rational(v) for v in table.values])
    return EXIT_OK


def _unit_solutions(m: int) -> tuple:
    """Recurrence plus initial data for the solutions whose ratios are reported."""
    r = _default_r(m)
    rec = gamma_rescale_recurrence(bessel_k_power(m), r)
    if m == 4:
        return rec, [1, 4], [[0, 1]]  # A_1 = 4 is forced once A_-1 = 0
    units = [[1 if i == j else 0 for i in range(rec.order)] for j in range(rec.order)]
    return rec, units[0], units[1:]


def cmd_apery_limit(args, out: Output) -> int:
    if args.N < 2:
        raise UsageError("--N must be at least 2")
    rec, init_a, others = _unit_solutions(args.m)
    labels = "BCDEFGH"
    limits = {}
    for label, init in zip(labels, others):
        lim = apery_limit(rec, init_a, init, args.N, args.prec)
        limits[label] = lim
        out.lines.append(f"{label}_{args.N}/A_{args.N} = {lim.digits()} +- {_num(lim.error_bound, 3)}")
        out.data[f"{label}/A"] = {"value": lim.digits(), "error_bound": _num(lim.error_bound, 3)}
    if args.m != 4:
        return EXIT_OK
    with mpmath.workdps(args.prec + 10):
        ref = zeta3(args.prec + 5).value * 7 / 24
        diff = abs(limits["B"].value - ref)
        tol = mpmath.mpf(10) ** -min(20, args.prec - 2)
    out.lines.append(f"7/24 zeta(3)  = {_num(ref, args.prec)}")
    out.lines.append(f"|difference|  = {_num(diff, 3)}")
    out.data.update(reference=_num(ref, args.prec), difference=_num(diff, 3))
    ok = diff < tol
    out.verdict(ok, f"B_N/A_N against 7/24 zeta(3) (tolerance {_num(tol, 1)})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_asympt(args, out: Output) -> int:
    n_hi = args.n_hi
    if args.sequence == "verrill":
        values = verrill_coefficients(args.m, n_hi).values
    else:
        if args.m != 4:
            raise UsageError("the d sequence is available for m = 4 only")
        rec, _, _ = _unit_solutions(4)
        digits = n_hi * 2 + 40
        b = solve_series(rec, [0, 1], n_hi).values
        a = verrill_coefficients(4, n_hi).values
        with mpmath.workdps(digits):
            z = zeta3(digits).value
            values = [z * 7 / 8 * a[n].numerator - 3 * mpmath.mpf(b[n].numerator) / b[n].denominator
                      for n in range(n_hi + 1)]
    fit = asymptotic_fit(values, args.n_lo, n_hi, dps=max(60, 2 * n_hi + 40))
    row = {"lambda": _num(fit.growth, 15), "b": _num(fit.exponent, 15),
           "C": _num(fit.constant, 15), "residual": _num(fit.residual, 3)}
    out.lines += [f"{k} = {v}" for k, v in row.items()]
    out.data.update(row)
    return EXIT_OK


def cmd_moments(args, out: Output) -> int:
    spec = _spec(args)
    rows = []
    for k in args.k:
        v = bessel_moment(args.m, k, args.prec, spec)
        rows.append({"k": k, "value": v.digits(), "error_bound": _num(v.error_bound, 3)})
        out.lines.append(f"c_{args.m},{k} = {v.digits()} +- {_num(v.error_bound, 3)}")
    out.data["moments"] = rows
    return EXIT_OK


def cmd_verify(args, out: Output) -> int:
    checks = pipeline.printed_equation_checks()
    ok = all(c.ok for c in checks) and all(d.confirmed for c in checks for d in c.misprints)
    for c in checks:
        out.lines.append(f"{c.name}: {'ok' if c.ok else 'MISMATCH'}")
        for d in c.misprints:
            out.lines.append(f"  printed {d.kind} misprint at x^{d.x_power}: {d.printed}"
                             f" [{'confirmed' if d.confirmed else 'not confirmed'}]")
    out.data["checks"] = [
        {"name": c.name, "ok": c.ok, "derived": c.derived, "misprints": [d.__dict__ for d in c.misprints]}
        for c in checks
    ]
    reports = []
    if args.numeric:
        spec = _spec(args)
        reports = [pipeline.theorem_d4_check(prec=args.prec, spec=spec, strict=False),
                   pipeline.constants_5_6_check(prec=args.prec, spec=spec, strict=False)]
        for rep in reports:
            out.lines.append(rep.to_text())
        out.data["numeric"] = [rep.to_json() for rep in reports]
        ok = ok and all(rep.passed for rep in reports)
    out.verdict(ok, f"{len(checks)} printed equations" + (" and numeric identities" if reports else ""))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fan(args, out: Output) -> int:
    prec = None if args.no_numeric else args.prec
    rep = pipeline.bessel_fan_check(args.m, args.order, prec, _spec(args), strict=False)
    out.lines.append(rep.to_text())
    out.data["report"] = rep.to_json()
    out.verdict(rep.passed, f"Bessel fan for m={args.m} to order {args.order}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_report(args, out: Output) -> int:
    ms = args.m or list(range(2, 8))
    reports = [pipeline.main_theorem_check(m, args.order, strict=False) for m in ms]
    ok = all(r.passed for r in reports)
    for r in reports:
        out.lines.append(r.to_text())
    out.data["reports"] = [r.to_json() for r in reports]
    out.verdict(ok, f"mirrored moment ODE equals the Verrill ODE for m in {ms}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="besselcy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, m=True, numeric=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("text", "json"), default="text")
        if m:
            p.add_argument("--m", type=_positive, required=True, help="power of the Bessel function")
        if numeric:
            p.add_argument("--prec", type=_positive, default=DEFAULT_PREC, help="decimal digits")
            p.add_argument("--quad-level", type=int, default=None, help="initial quadrature level")
        p.set_defaults(func=func)
        return p

    p = add("annihilator", cmd_annihilator, "annihilator of y^m")
    p.add_argument("--base", default="K0", help="K0 (theta^2 - x^2) or S (theta^2 - x)")
    p = add("moment-rec", cmd_moment_rec, "recurrence of the moments c_(m,k)")
    p.add_argument("--parity", type=int, choices=(0, 1), default=None, help="restrict to k = 2n + parity")
    p = add("d-ode", cmd_d_ode, "operator and recurrence for d_n = r^(2n)/n!^2 c_(m,2n+1)")
    p.add_argument("--r", type=_rational, default=None)
    p = add("mirror", cmd_mirror, "d-ODE after x -> 1/(c x), theta -> -theta - 1")
    p.add_argument("--r", type=_rational, default=None)
    p.add_argument("--c", type=_rational, default=None, help="default (2r)^2")
    p = add("verrill", cmd_verrill, "A_0 .. A_N, sums of squared multinomials")
    p.add_argument("--N", type=int, required=True)
    add("verrill-ode", cmd_verrill_ode, "operator annihilating sum A_n x^n")
    p = add("solve", cmd_solve, "solve the d_n recurrence from initial values")
    p.add_argument("--r", type=_rational, default=None)
    p.add_argument("--init", type=_rational_list, required=True, help="comma separated initial values")
    p.add_argument("--N", type=int, required=True)
    p = add("apery-limit", cmd_apery_limit, "ratios of recurrence solutions at n = N")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--prec", type=_positive, default=30)
    p = add("asympt", cmd_asympt, "fit C n^b lambda^n")
    p.add_argument("--sequence", choices=("verrill", "d"), default="verrill")
    p.add_argument("--n-lo", type=int, default=100)
    p.add_argument("--n-hi", type=int, default=400)
    p = add("moments", cmd_moments, "Bessel moments by quadrature", numeric=True)
    p.add_argument("--k", type=lambda s: [int(v) for v in s.split(",")], required=True, help="comma separated")
    p = add("verify", cmd_verify, "printed equations against their derivations", m=False, numeric=True)
    p.add_argument("--numeric", action="store_true", help="also run the quadrature identities")
    p = add("fan", cmd_fan, "even moments and x^-1 I0(1/x)^m", numeric=True)
    p.add_argument("--order", type=_positive, default=30)
    p.add_argument("--no-numeric", action="store_true")
    p = add("report", cmd_report, "moment side against Verrill side", m=False)
    p.add_argument("--m", type=int, action="append", help="repeatable; default 2..7")
    p.add_argument("--order", type=_positive, default=40)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "report" and args.m and min(args.m) < 2:
        parser.error("report needs m >= 2")
    if getattr(args, "N", 0) is not None and getattr(args, "N", 0) < 0:
        parser.error("--N must be non-negative")
    out = Output(args.format)
    try:
        code = args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"besselcy {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionNotReached, SingularLeadingCoefficient, pipeline.StageMismatch,
            pipeline.SeriesNotAnnihilated, pipeline.ToleranceExceeded) as exc:
        print(f"besselcy {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
