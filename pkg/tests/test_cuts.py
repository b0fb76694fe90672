from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cgiter.cuts import (CgCut, DegenerateIterateError, IntegerInfeasibleRowError, NoCutError, TrivialCutError,
                         cg_from_gf, cuts_from_solution, gf_from_row, iterate_cut)
from cgiter.lp import IlpInstance, TableauRow, solve_lp, tableau_row
from oracles import integer_points
from test_lp import ONE_D, small_instances


def test_one_dimensional_pipeline():
    sol = solve_lp(ONE_D)
    gf = gf_from_row(tableau_row(sol, 0))
    assert gf.frac_coeffs == {1: F(1, 2)} and gf.rhs == F(1, 2)
    cg = cg_from_gf(gf, sol, ONE_D)
    assert cg.lam == (F(1, 2),) and cg.q == 2 and cg.nu == F(1, 2)
    assert (cg.pi, cg.pi0) == ((1,), 1)
    assert cg.augmented == (F(1, 2), F(1, 2)) and cg.p_aug == (1, 1)


def test_gf_examples():
    row = TableauRow(1, {4: F(3, 4), 6: F(1, 3)}, F(7, 3))
    gf = gf_from_row(row)
    assert gf.frac_coeffs == {4: F(3, 4), 6: F(1, 3)} and gf.rhs == F(1, 3)
    with pytest.raises(NoCutError):
        gf_from_row(TableauRow(0, {1: F(1, 2)}, F(2)))
    with pytest.raises(IntegerInfeasibleRowError):
        gf_from_row(TableauRow(0, {1: F(2)}, F(1, 2)))


def test_trivial_multipliers():
    inst = IlpInstance((1, 1), ((1, 1), (1, 3)), (2, 4))
    with pytest.raises(TrivialCutError):
        CgCut.from_multiplier((0, 0), inst)
    cg = CgCut.from_multiplier((F(1, 2), F(1, 2)), inst)
    assert cg.trivial  # (2 + 4) / 2 is integral


def test_iterate_examples():
    inst = IlpInstance((1,), ((1,),), (3,))
    cg = CgCut.from_multiplier((F(1, 4),), inst)
    assert cg.nu == F(3, 4)
    it1 = iterate_cut(cg, 1)
    assert it1.mu == cg.lam and it1.rounding == cg.nu
    it3 = iterate_cut(cg, 3)
    assert it3.mu == (F(3, 4),) and it3.rounding == F(1, 4)
    assert iterate_cut(cg, -1) == it3
    with pytest.raises(DegenerateIterateError):
        iterate_cut(cg, 4)


def test_complement_iterate():
    inst = IlpInstance((1, 2), ((3, 2), (1, 4)), (7, 5))
    cg = CgCut.from_multiplier((F(1, 6), F(1, 3)), inst)
    it = iterate_cut(cg, cg.q - 1)
    assert it.mu == tuple(1 - v if v else 0 for v in cg.lam)
    assert it.rounding == 1 - cg.nu


@settings(max_examples=60, deadline=None)
@given(small_instances(max_n=4, max_m=3, max_b=10))
def test_every_iterate_is_valid_and_cuts_x_star(inst):
    sol = solve_lp(inst)
    pts = integer_points(inst.A, inst.b, inst.n)
    for cg in cuts_from_solution(sol, inst):
        for t in range(1, cg.q):
            it = iterate_cut(cg, t)
            assert it == iterate_cut(cg, t + cg.q)
            # floored form at x* is violated by exactly the rounding effect
            assert it.violation(sol.x_star) == it.rounding
            assert it.slack_form_lhs(inst, sol.x_star) == 0
            for x in pts:
                assert it.violation(x) <= 0


@settings(max_examples=40, deadline=None)
@given(small_instances(max_n=4, max_m=3, max_b=10))
def test_cg_dominates_gf(inst):
    """Rewritten through s = b - Ax, the CG cut implies the GF cut on the LP region."""
    sol = solve_lp(inst)
    for cg in cuts_from_solution(sol, inst):
        assert 0 < cg.nu < 1
        gf = gf_from_row(tableau_row(sol, cg.source_row))
        it = iterate_cut(cg, 1)
        # the slack-form left side equals the GF left side at every standard-form point
        for x in integer_points(inst.A, inst.b, inst.n)[:20] + [sol.x_star]:
            s = [F(bi) - sum(a * v for a, v in zip(row, x)) for row, bi in zip(inst.A, inst.b)]
            x_aug = list(x) + s
            gf_lhs = sum(a * x_aug[i] for i, a in gf.frac_coeffs.items())
            assert it.slack_form_lhs(inst, x) - gf_lhs >= 0
            assert (it.slack_form_lhs(inst, x) - gf_lhs).denominator == 1
        assert gf.rhs == cg.nu
