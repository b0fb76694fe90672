"""Input checking shared by the estimators and the command line."""
from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from typing import Sequence

from .arith import as_rational, common_form
from .lp import IlpInstance


class InputError(ValueError):
    """Malformed user input; the message names the offending field."""


def _int_entry(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        raise InputError(f"{where}: expected an integer, got {v!r}")
    return v


def check_instance(data, source: str = "instance") -> IlpInstance:
    """Build an :class:`IlpInstance` from a mapping or pass one through.

    Accepts ``{n, m, c, A, b}``; ``n`` and ``m`` are optional but must agree
    with the arrays when present.
    """
    if isinstance(data, IlpInstance):
        return data
    if not isinstance(data, dict):
        raise InputError(f"{source}: expected a JSON object")
    for key in ("c", "A", "b"):
        if key not in data:
            raise InputError(f"{source}: missing field '{key}'")
    c, A, b = data["c"], data["A"], data["b"]
    if not isinstance(c, list) or not isinstance(b, list) or not isinstance(A, list):
        raise InputError(f"{source}: 'c', 'A' and 'b' must be arrays")
    c = [_int_entry(v, f"{source}: c[{j}]") for j, v in enumerate(c)]
    b = [_int_entry(v, f"{source}: b[{i}]") for i, v in enumerate(b)]
    rows = []
    for i, row in enumerate(A):
        if not isinstance(row, list):
            raise InputError(f"{source}: A[{i}] must be an array")
        if len(row) != len(c):
            raise InputError(f"{source}: A[{i}] has {len(row)} entries, expected {len(c)}")
        rows.append([_int_entry(v, f"{source}: A[{i}][{j}]") for j, v in enumerate(row)])
    if len(rows) != len(b):
        raise InputError(f"{source}: A has {len(rows)} rows but b has {len(b)} entries")
    if "n" in data and _int_entry(data["n"], f"{source}: n") != len(c):
        raise InputError(f"{source}: n = {data['n']} but c has {len(c)} entries")
    if "m" in data and _int_entry(data["m"], f"{source}: m") != len(b):
        raise InputError(f"{source}: m = {data['m']} but b has {len(b)} entries")
    if not c or not b:
        raise InputError(f"{source}: empty instance")
    return IlpInstance(tuple(c), tuple(map(tuple, rows)), tuple(b))


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_instance(path: str) -> IlpInstance:
    return check_instance(load_json(path), source=path)


def parse_rational(text: str, where: str = "value") -> Fraction:
    try:
        return as_rational(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"{where}: cannot parse {text!r} as a rational") from exc


def check_nu(nu) -> tuple[tuple[int, ...], int]:
    """Standard form ``(p, q)`` of a multiplier: entries reduced mod 1, gcd 1."""
    if isinstance(nu, dict):
        if "p" not in nu or "q" not in nu:
            raise InputError("nu: JSON form needs fields 'p' and 'q'")
        q = _int_entry(nu["q"], "nu: q")
        if q <= 0:
            raise InputError("nu: q must be positive")
        vals = [Fraction(_int_entry(v, f"nu: p[{i}]"), q) for i, v in enumerate(nu["p"])]
    elif isinstance(nu, tuple) and len(nu) == 2 and isinstance(nu[1], int) and not isinstance(nu[0], int):
        p, q = nu
        if q <= 0:
            raise InputError("nu: q must be positive")
        vals = [Fraction(int(v), q) for v in p]
    else:
        vals = [as_rational(v) for v in nu]
    if not vals:
        raise InputError("nu: empty vector")
    vals = [v - math.floor(v) for v in vals]
    return common_form(vals)


def parse_nu(text: str) -> tuple[tuple[int, ...], int]:
    """Read ``"p1/q p2/q ..."`` or ``{"p": [...], "q": ...}``; a path to such a file also works."""
    s = text.strip()
    if os.path.isfile(s):
        with open(s, encoding="utf-8") as fh:
            s = fh.read().strip()
    if s.startswith("{"):
        try:
            return check_nu(json.loads(s))
        except json.JSONDecodeError as exc:
            raise InputError(f"nu: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    parts = s.replace(",", " ").split()
    return check_nu([parse_rational(p, f"nu[{i}]") for i, p in enumerate(parts)])


def parse_vector(text: str, d: int | None = None, where: str = "vector") -> tuple[Fraction, ...]:
    parts = text.replace(",", " ").split()
    v = tuple(parse_rational(p, f"{where}[{i}]") for i, p in enumerate(parts))
    if d is not None and len(v) != d:
        raise InputError(f"{where}: expected {d} entries, got {len(v)}")
    return v


def check_strategy(s) -> object:
    if s in (0, 1, 2, 3, 4, 5, "approx-mult", "approx-add"):
        return s
    if isinstance(s, str) and s.isdigit() and int(s) in range(6):
        return int(s)
    raise InputError(f"unknown strategy {s!r}")


def as_int_tuple(v: Sequence) -> tuple[int, ...]:
    return tuple(int(x) for x in v)
