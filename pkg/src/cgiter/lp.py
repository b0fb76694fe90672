"""Exact simplex over the rationals and an exact branch-and-bound ILP oracle.

Problems have the fixed form ``max c^T x  s.t.  A x <= b, x >= 0``. After
adding slacks the column order is ``x_0 .. x_{n-1}, s_0 .. s_{m-1}``; that
index convention is what :mod:`cgiter.cuts` relies on.

The tableau is stored fraction-free: an integer matrix ``M`` together with a
positive integer ``D`` such that the true tableau is ``M / D``. Pivoting
keeps ``D`` equal to ``|det B|`` of the current basis, so the determinant
needed by the experiment harness comes for free.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import dot, floor

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class NotBasicError(ValueError):
    pass


class InvalidCutError(RuntimeError):
    """A supposedly valid cut made the LP relaxation infeasible."""


class InfeasibleError(RuntimeError):
    pass


def _integral(v) -> int:
    if isinstance(v, bool) or Fraction(v).denominator != 1:
        raise ValueError(f"instance data must be integral, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class IlpInstance:
    """``max c^T x  s.t.  A x <= b, x >= 0, x integer`` with integer data."""

    c: tuple
    A: tuple
    b: tuple

    def __post_init__(self):
        c = tuple(_integral(v) for v in self.c)
        A = tuple(tuple(_integral(v) for v in row) for row in self.A)
        b = tuple(_integral(v) for v in self.b)
        if len(A) != len(b):
            raise ValueError(f"A has {len(A)} rows but b has {len(b)} entries")
        if any(len(row) != len(c) for row in A):
            raise ValueError("every row of A must have len(c) entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.A)

    def is_feasible(self, x: Sequence) -> bool:
        if any(v < 0 for v in x):
            return False
        return all(dot(row, x) <= bi for row, bi in zip(self.A, self.b))

    def with_rows(self, rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> "IlpInstance":
        return IlpInstance(self.c, self.A + tuple(tuple(r) for r in rows), self.b + tuple(rhs))

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "c": list(self.c),
                "A": [list(r) for r in self.A], "b": list(self.b)}


@dataclass(frozen=True)
class LpSolution:
    status: str
    x_star: tuple = ()
    objective: Fraction | None = None
    basis: tuple = ()
    basis_det: int = 0
    # fraction-free final tableau over the n + m standard-form columns plus rhs
    _rows: tuple = field(default=(), repr=False, compare=False)
    _n: int = field(default=0, repr=False, compare=False)

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def slack_values(self, inst: IlpInstance) -> tuple:
        return tuple(Fraction(bi) - dot(row, self.x_star) for row, bi in zip(inst.A, inst.b))

    def fractional_basics(self) -> list[int]:
        """Basic variables (structural or slack) whose value is not integral."""
        out = []
        for k, row in zip(self.basis, self._rows):
            if row[-1] % self.basis_det:
                out.append(k)
        return sorted(out)


@dataclass(frozen=True)
class TableauRow:
    """``x_k + sum_i coeffs[i] * x_i = rhs`` over the nonbasic indices."""

    basic_index: int
    coeffs: dict
    rhs: Fraction

    def evaluate(self, x_aug: Sequence) -> Fraction:
        """Left-hand side at a standard-form point ``(x, s)``."""
        return Fraction(x_aug[self.basic_index]) + sum(
            (a * x_aug[i] for i, a in self.coeffs.items()), Fraction(0))


class _Tableau:
    """Dense fraction-free tableau. Row ``-1`` is the objective row."""

    def __init__(self, rows, obj, basis, D=1):
        self.rows = rows
        self.obj = obj
        self.basis = basis
        self.D = D

    def pivot(self, r: int, s: int) -> None:
        rows, D = self.rows, self.D
        pr = rows[r]
        p = pr[s]
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[s]
            if f:
                rows[i] = [(a * p - f * b) // D for a, b in zip(row, pr)]
            elif p != D:
                rows[i] = [(a * p) // D for a in row]
        f = self.obj[s]
        if f:
            self.obj = [(a * p - f * b) // D for a, b in zip(self.obj, pr)]
        elif p != D:
            self.obj = [(a * p) // D for a in self.obj]
        if p < 0:
            self.rows = [[-a for a in row] for row in self.rows]
            self.obj = [-a for a in self.obj]
            p = -p
        self.D = p
        self.basis[r] = s

    def entering(self, allowed: int) -> int | None:
        # Bland: lowest-index column with negative reduced cost
        for j in range(allowed):
            if self.obj[j] < 0:
                return j
        return None

    def leaving(self, s: int) -> int | None:
        best = None
        for i, row in enumerate(self.rows):
            a = row[s]
            if a <= 0:
                continue
            if best is None:
                best = i
                continue
            # compare row[-1]/a with rows[best][-1]/rows[best][s]
            lhs = row[-1] * self.rows[best][s]
            rhs = self.rows[best][-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best = i
        return best

    def run(self, allowed: int, max_iter: int = 1_000_000) -> str:
        for _ in range(max_iter):
            s = self.entering(allowed)
            if s is None:
                return OPTIMAL
            r = self.leaving(s)
            if r is None:
                return UNBOUNDED
            self.pivot(r, s)
        raise RuntimeError("simplex iteration limit reached")


def solve_lp(inst: IlpInstance) -> LpSolution:
    """Two-phase primal simplex with Bland's rule, in exact arithmetic."""
    n, m = inst.n, inst.m
    ncols = n + m
    neg = [i for i in range(m) if inst.b[i] < 0]
    na = len(neg)
    art_of = {i: ncols + k for k, i in enumerate(neg)}
    width = ncols + na + 1
    rows = []
    basis = []
    for i in range(m):
        sign = -1 if i in art_of else 1
        row = [0] * width
        for j, a in enumerate(inst.A[i]):
            row[j] = sign * a
        row[n + i] = sign
        row[-1] = sign * inst.b[i]
        if i in art_of:
            row[art_of[i]] = 1
            basis.append(art_of[i])
        else:
            basis.append(n + i)
        rows.append(row)

    if na:
        # maximize -sum(artificials); express the objective over nonbasic columns
        obj = [0] * width
        for i in neg:
            for j in range(width):
                if j < ncols or j == width - 1:
                    obj[j] -= rows[i][j]
        tab = _Tableau(rows, obj, basis)
        status = tab.run(ncols + na)
        if tab.obj[-1] < 0:
            return LpSolution(INFEASIBLE)
        # drive zero-level artificials out of the basis
        for r, k in enumerate(tab.basis):
            if k >= ncols:
                s = next((j for j in range(ncols) if tab.rows[r][j]), None)
                if s is None:
                    raise RuntimeError("redundant row with slack columns present")
                tab.pivot(r, s)
        rows = [row[:ncols] + [row[-1]] for row in tab.rows]
        basis, D = tab.basis, tab.D
    else:
        D = 1
    width = ncols + 1
    obj = [0] * width
    for j in range(n):
        obj[j] = -inst.c[j] * D
    for r, k in enumerate(basis):
        ck = inst.c[k] if k < n else 0
        if ck:
            row = rows[r]
            for j in range(width):
                obj[j] += ck * row[j]
    tab = _Tableau(rows, obj, list(basis), D)
    status = tab.run(ncols)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)
    D = tab.D
    x = [Fraction(0)] * n
    for r, k in enumerate(tab.basis):
        if k < n:
            x[k] = Fraction(tab.rows[r][-1], D)
    return LpSolution(
        status=OPTIMAL,
        x_star=tuple(x),
        objective=Fraction(tab.obj[-1], D),
        basis=tuple(tab.basis),
        basis_det=D,
        _rows=tuple(tuple(row) for row in tab.rows),
        _n=n,
    )


def tableau_row(sol: LpSolution, k: int) -> TableauRow:
    if not sol.is_optimal:
        raise ValueError("tableau rows exist only for optimal solutions")
    try:
        r = sol.basis.index(k)
    except ValueError:
        raise NotBasicError(f"variable {k} is not basic") from None
    row, D = sol._rows[r], sol.basis_det
    basic = set(sol.basis)
    coeffs = {j: Fraction(row[j], D) for j in range(len(row) - 1) if j not in basic}
    return TableauRow(k, coeffs, Fraction(row[-1], D))


def _bounded_instance(inst: IlpInstance, lower, upper):
    """Shift ``x = lower + y`` and append ``y_j <= upper_j - lower_j`` rows."""
    b = [bi - sum(a * l for a, l in zip(row, lower)) for row, bi in zip(inst.A, inst.b)]
    extra, rhs = [], []
    for j, u in enumerate(upper):
        if u is not None:
            e = [0] * inst.n
            e[j] = 1
            extra.append(e)
            rhs.append(u - lower[j])
    return IlpInstance(inst.c, inst.A + tuple(tuple(e) for e in extra), tuple(b) + tuple(rhs))


def solve_ilp(inst: IlpInstance, node_limit: int | None = None) -> tuple[Fraction, tuple]:
    """Exact integer optimum by depth-first branch and bound.

    Branches on the lowest-index fractional variable, floor branch first.
    Raises :class:`InfeasibleError` if there is no integer point and
    ``ValueError`` if the LP relaxation is unbounded.
    """
    root = solve_lp(inst)
    if root.status == UNBOUNDED:
        raise ValueError("LP relaxation is unbounded")
    if root.status == INFEASIBLE:
        raise InfeasibleError("ILP is infeasible")
    integral_obj = True  # c is integer, so integer points have integer value
    best_val: Fraction | None = None
    best_x: tuple | None = None

    def consider(x):
        nonlocal best_val, best_x
        if inst.is_feasible(x):
            v = Fraction(dot(inst.c, x))
            if best_val is None or v > best_val:
                best_val, best_x = v, tuple(x)

    stack = [((0,) * inst.n, (None,) * inst.n, root)]
    nodes = 0
    while stack:
        lower, upper, sol = stack.pop()
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise RuntimeError("branch-and-bound node limit exceeded")
        if sol is None:
            sol = solve_lp(_bounded_instance(inst, lower, upper))
            if sol.status != OPTIMAL:
                continue
            x = tuple(l + v for l, v in zip(lower, sol.x_star))
            z = sol.objective + dot(inst.c, lower)
        else:
            x, z = sol.x_star, sol.objective
        if best_val is not None:
            bound = Fraction(floor(z)) if integral_obj else z
            if bound <= best_val:
                continue
        j = next((i for i, v in enumerate(x) if v.denominator != 1), None)
        if j is None:
            consider(tuple(int(v) for v in x))
            continue
        consider(tuple(floor(v) for v in x))
        if best_val is not None and Fraction(floor(z)) <= best_val:
            continue
        fl = floor(x[j])
        up_lower = list(lower)
        up_lower[j] = fl + 1
        dn_upper = list(upper)
        dn_upper[j] = fl
        # pushed last = explored first
        stack.append((tuple(up_lower), upper, None))
        if fl >= lower[j]:
            stack.append((lower, tuple(dn_upper), None))
    log.debug("branch and bound explored %d nodes", nodes)
    if best_x is None:
        raise InfeasibleError("ILP is infeasible")
    return best_val, best_x


def resolve_with_cut(inst: IlpInstance, pi: Sequence[int], pi0: int) -> Fraction:
    """LP optimum after appending the single inequality ``pi^T x <= pi0``."""
    sol = solve_lp(inst.with_rows([pi], [pi0]))
    if sol.status == INFEASIBLE:
        raise InvalidCutError("LP became infeasible after adding the cut")
    if sol.status == UNBOUNDED:
        raise ValueError("LP relaxation is unbounded")
    return sol.objective
