"""Printed operators and recursions shipped as text-grammar files.

Each ``data/<name>.txt`` holds ``# key: value`` header lines and one
expression.  ``kind`` is ``operator`` (x, theta), ``recurrence`` (``N^j``
marks ``d_(n - j*step)``) or ``forward-recurrence`` (``S^i`` marks
``d_(k + i*step)``).  ``printed_terms.json`` lists the terms whose printed
form disagrees with the corrected fixture.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .sequences import Recurrence, parse_recurrence
from .theta import ThetaOperator, ThetaPoly, _parse_bivariate, normalize, parse_operator


def _read(name: str) -> str:
    return resources.files("besselcy").joinpath("data").joinpath(name).read_text()


def fixture_names() -> list[str]:
    return sorted(
        p.name[:-4] for p in resources.files("besselcy").joinpath("data").iterdir() if p.name.endswith(".txt")
    )


def _split(text: str) -> tuple[dict[str, str], str]:
    meta, body = {}, []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            key, sep, value = s[1:].partition(":")
            if sep:
                meta[key.strip()] = value.strip()
        elif s:
            body.append(s)
    return meta, " ".join(body)


def load(name: str) -> ThetaOperator | Recurrence:
    meta, expr = _split(_read(f"{name}.txt"))
    kind = meta.get("kind", "operator")
    if kind == "operator":
        return parse_operator(expr)
    step = int(meta.get("step", 1))
    var = meta.get("var", "n")
    if kind == "recurrence":
        return parse_recurrence(expr, step=step, var=var).normalize()
    if kind == "forward-recurrence":
        coeffs = _parse_bivariate(expr, "S", var)
        by_shift: dict[int, dict[int, Fraction]] = {}
        for (i, e), c in coeffs.items():
            by_shift.setdefault(i, {})[e] = c
        polys = [
            ThetaPoly(by_shift.get(i, {}).get(e, 0) for e in range(max(by_shift.get(i, {0: 0})) + 1))
            for i in range(max(by_shift) + 1)
        ]
        return Recurrence.from_forward(polys, step).normalize()
    raise ValueError(f"unknown fixture kind {kind!r}")


def load_operator(name: str) -> ThetaOperator:
    op = load(name)
    if not isinstance(op, ThetaOperator):
        raise TypeError(f"fixture {name} is not an operator")
    return normalize(op)


def load_recurrence(name: str) -> Recurrence:
    rec = load(name)
    if not isinstance(rec, Recurrence):
        raise TypeError(f"fixture {name} is not a recurrence")
    return rec


def misprints() -> dict[str, list[dict]]:
    return json.loads(_read("printed_terms.json"))


@dataclass(frozen=True)
class Discrepancy:
    fixture: str
    x_power: int
    printed: str
    kind: str
    confirmed: bool  # the derived term really differs from the printed one as described


def discrepancy_report(name: str, derived: ThetaOperator) -> tuple[bool, list[Discrepancy]]:
    """Compare ``derived`` with the corrected fixture and check each flagged printed term.

    Returns ``(matches_corrected, discrepancies)``.  A ``factor`` misprint is
    confirmed when the printed term differs from the derived one; a ``sign``
    misprint when the printed magnitude is right.
    """
    fixture = load_operator(name)
    derived = normalize(derived)
    found = []
    for entry in misprints().get(name, []):
        j = int(entry["x_power"])
        printed = parse_operator(entry["printed"])[j]
        got = derived[j]
        # derived is normalized like the fixture, whose content scale is 1 here
        if entry["kind"] == "sign":
            confirmed = got == printed or got == -printed
        else:
            confirmed = got != printed
        found.append(Discrepancy(name, j, entry["printed"], entry["kind"], confirmed))
    return derived == fixture, found
