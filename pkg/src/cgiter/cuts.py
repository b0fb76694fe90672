"""Gomory fractional cuts, their Chvatal-Gomory form, and iterates mod 1."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import dot, floor, frac, lcm_denominator, normalize_multiplier
from .lp import IlpInstance, LpSolution, tableau_row


class NoCutError(ValueError):
    """The tableau row has an integral right-hand side."""


class IntegerInfeasibleRowError(ValueError):
    """Row with fractional rhs but no fractional coefficient: no integer point exists."""


class TrivialCutError(ValueError):
    pass


class DegenerateIterateError(ValueError):
    pass


@dataclass(frozen=True)
class GfCut:
    """``sum_i frac_coeffs[i] * x_i >= rhs`` over nonbasic standard-form indices."""

    frac_coeffs: dict
    rhs: Fraction
    source_row: int


@dataclass(frozen=True)
class IteratedCut:
    t: int
    mu: tuple
    rounding: Fraction
    pi: tuple
    pi0: int

    @property
    def nontrivial(self) -> bool:
        return self.rounding > 0

    def violation(self, x: Sequence) -> Fraction:
        """``pi^T x - pi0``; positive means ``x`` is cut off."""
        return dot(self.pi, x) - self.pi0

    def slack_form_lhs(self, inst: IlpInstance, x: Sequence) -> Fraction:
        """Left side of ``sum_j {mu^T A_j} x_j + mu^T s >= {mu^T b}`` at ``x``."""
        s = [Fraction(bi) - dot(row, x) for row, bi in zip(inst.A, inst.b)]
        struct = sum((frac(dot(self.mu, inst.column(j))) * x[j] for j in range(inst.n)), Fraction(0))
        return struct + dot(self.mu, s)


def _floored_inequality(p: Sequence[int], q: int, inst: IlpInstance) -> tuple[tuple, int]:
    # floor((p/q)^T A_j) on integers, no fractions needed
    pi = tuple(sum(pi_ * row[j] for pi_, row in zip(p, inst.A)) // q for j in range(inst.n))
    pi0 = sum(pi_ * bi for pi_, bi in zip(p, inst.b)) // q
    return pi, pi0


@dataclass(frozen=True)
class CgCut:
    """A multiplier ``lam = p / q`` in ``[0,1)^m`` and the cut it induces.

    ``augmented`` is ``(lam_1, ..., lam_m, nu)`` with ``nu = {lam^T b}``; all
    of it shares the denominator ``q``. ``p_aug`` holds the numerators.
    """

    lam: tuple
    q: int
    p: tuple
    nu: Fraction
    pi: tuple
    pi0: int
    source_row: int | None = None
    inst: IlpInstance | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_multiplier(cls, lam: Sequence, inst: IlpInstance, source_row: int | None = None) -> "CgCut":
        lam = tuple(frac(Fraction(v)) for v in lam)
        if len(lam) != inst.m:
            raise ValueError(f"multiplier has {len(lam)} entries, instance has {inst.m} rows")
        q = lcm_denominator(lam)
        p, q = normalize_multiplier(tuple(int(v * q) for v in lam), q)
        if not any(p):
            raise TrivialCutError("zero multiplier gives the trivial cut 0 <= 0")
        nu = frac(dot(lam, inst.b))
        pi, pi0 = _floored_inequality(p, q, inst)
        return cls(lam, q, p, nu, pi, pi0, source_row, inst)

    @property
    def trivial(self) -> bool:
        return self.nu == 0

    @property
    def d(self) -> int:
        return len(self.lam) + 1

    @property
    def augmented(self) -> tuple:
        return self.lam + (self.nu,)

    @property
    def p_aug(self) -> tuple:
        return self.p + (int(self.nu * self.q),)


def gf_from_row(row) -> GfCut:
    rhs = frac(row.rhs)
    if rhs == 0:
        raise NoCutError(f"row of x_{row.basic_index} has integral rhs")
    coeffs = {i: frac(a) for i, a in row.coeffs.items()}
    if not any(coeffs.values()):
        raise IntegerInfeasibleRowError(
            f"row of x_{row.basic_index} has fractional rhs but integral coefficients")
    return GfCut(coeffs, rhs, row.basic_index)


def cg_from_gf(gf: GfCut, sol: LpSolution, inst: IlpInstance) -> CgCut:
    """Eliminate slacks: the CG multiplier is the slack part of the GF-cut."""
    n = inst.n
    lam = tuple(gf.frac_coeffs.get(n + i, Fraction(0)) for i in range(inst.m))
    return CgCut.from_multiplier(lam, inst, source_row=gf.source_row)


def iterate_cut(cg: CgCut, t: int, inst: IlpInstance | None = None) -> IteratedCut:
    """The cut from ``t * lam mod 1``; ``t`` is taken modulo ``q`` (so -1 means q-1)."""
    inst = inst if inst is not None else cg.inst
    if inst is None:
        raise ValueError("the cut carries no instance; pass one explicitly")
    tc = t % cg.q
    if tc == 0:
        raise DegenerateIterateError(f"t = {t} is a multiple of q = {cg.q}")
    p = tuple(tc * pi % cg.q for pi in cg.p)
    mu = tuple(Fraction(pi, cg.q) for pi in p)
    rounding = frac(tc * cg.nu)
    pi, pi0 = _floored_inequality(p, cg.q, inst)
    return IteratedCut(tc, mu, rounding, pi, pi0)


def cuts_from_solution(sol: LpSolution, inst: IlpInstance) -> list[CgCut]:
    """One CG-cut per fractional basic variable, in increasing variable index."""
    out = []
    for k in sol.fractional_basics():
        gf = gf_from_row(tableau_row(sol, k))
        out.append(cg_from_gf(gf, sol, inst))
    return out
