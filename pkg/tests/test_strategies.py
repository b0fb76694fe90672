import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cgiter.arith import mod1
from cgiter.cuts import CgCut, TrivialCutError
from cgiter.lattice import basis_from_pq, covering_radius_bounds
from cgiter.lp import IlpInstance
from cgiter.strategies import (EnumerationGuardError, MembershipError, UndefinedRatioError, approx_add,
                               approx_mult, approx_point, c_point, check_corollary1, check_corollary2,
                               check_proposition1, check_proposition2, check_proposition3, check_theorem2,
                               geom_r, in_S, n_of, r_of, recover_t, run_strategy, strategy_add_exact,
                               strategy_basic, strategy_mult_exact)
from geom_oracle import max_ratio_bracket
from oracles import iterate, naive_add, naive_mult

QUARTER = ((1, 3), 4)
HALF = ((1, 1), 2)


@st.composite
def pq_vectors(draw, dims=(2, 3, 4), max_q=200, nonzero_last=True):
    d = draw(st.sampled_from(dims))
    q = draw(st.integers(2, max_q))
    p = draw(st.lists(st.integers(0, q - 1), min_size=d, max_size=d))
    if nonzero_last and p[-1] == 0:
        p[-1] = 1
    g = math.gcd(q, *p)
    if g != 1:
        p[-1] = 1 if p[-1] % q == 0 else p[-1]
        if math.gcd(q, *p) != 1:
            p[0] = 1
    return tuple(p), q


def test_n_and_r_examples():
    assert n_of((F(1, 4), F(3, 4))) == F(1, 8)
    assert n_of((0, 1)) == 0
    assert n_of((F(1, 2), F(1, 2))) == F(1, 2)
    assert r_of((F(1, 4), F(3, 4))) == F(1, 9)
    assert r_of((0, F(2, 7))) == 0
    assert r_of((F(3, 4), F(1, 4))) == 9
    with pytest.raises(UndefinedRatioError):
        r_of((F(1, 2), 0))


def test_basic_examples():
    for kind in (0, 1, 2):
        assert strategy_basic(kind, ((1, 3), 4)).t == 1  # nu = 3/4
    assert strategy_basic(1, ((1, 1), 5)).t == 4
    assert strategy_basic(2, ((1, 1), 5)).t == 4
    assert strategy_basic(3, QUARTER).t == 1
    assert strategy_basic(3, ((0, 2), 7)).rounding == F(6, 7)
    with pytest.raises(TrivialCutError):
        strategy_basic(0, ((1, 0), 4))


def test_exact_examples():
    r = strategy_mult_exact(QUARTER)
    assert (r.t, r.r_ratio, r.n_value) == (1, F(1, 9), F(1, 8))
    r = strategy_add_exact(QUARTER)
    assert (r.t, r.n_value) == (1, F(1, 8))
    assert strategy_mult_exact(HALF).t == 1
    assert strategy_add_exact(HALF).n_value == F(1, 2)
    # zero projection: every ratio is 0, lowest t wins
    assert strategy_mult_exact(((0, 3), 7)).t == 1
    # additive with zero projection coincides with strategy 3
    assert strategy_add_exact(((0, 0, 3), 7)).t == strategy_basic(3, ((0, 0, 3), 7)).t
    with pytest.raises(EnumerationGuardError):
        strategy_mult_exact(((1, 1), 101), guard=100)


@settings(max_examples=80, deadline=None)
@given(pq_vectors())
def test_exact_against_naive(pq):
    p, q = pq
    v, t = naive_mult(p, q)
    r = strategy_mult_exact(pq)
    assert (r.r_ratio, r.t) == (v, t)
    v, t = naive_add(p, q)
    r = strategy_add_exact(pq)
    assert (r.n_value, r.t) == (v, t)


@settings(max_examples=60, deadline=None)
@given(pq_vectors())
def test_result_invariants_and_strategy3(pq):
    p, q = pq
    best = run_strategy(3, pq)
    for s in (0, 1, 2, 3, 4, 5):
        r = run_strategy(s, pq)
        assert 1 <= r.t <= q - 1
        assert r.xi == iterate(p, q, r.t) and r.rounding == r.xi[-1]
        assert (r.r_ratio is not None) == (r.rounding > 0)
        assert r.rounding <= best.rounding
    assert best.rounding == max(iterate(p, q, t)[-1] for t in range(1, q))
    r1 = run_strategy(1, pq)
    nu = F(p[-1], q)
    if nu < F(1, 2):
        assert F(1, 2) <= r1.rounding < 1 and r1.t * nu < 1 <= (r1.t + 1) * nu


def test_geom_examples():
    g = geom_r(2, F(1, 4))
    assert g.exact and g.a_val == F(4, 5) and g.r_sq == F(9, 16)
    assert not geom_r(3, F(1, 2)).finite
    assert geom_r(2, F(1, 10**6)).r_sq < F(1, 10**10)
    with pytest.raises(ValueError):
        geom_r(2, 0)


@pytest.mark.parametrize("d,R", [(2, F(1, 4)), (3, F(3, 8))])
def test_geom_against_grid(d, R):
    g = geom_r(d, R)
    lo, hi = max_ratio_bracket(d, R, gap=1e-6)
    r = math.sqrt(float(g.r_sq))
    assert lo - 1e-5 <= r <= hi + 1e-5


def test_recover_examples():
    assert recover_t((F(1, 4), F(3, 4)), QUARTER) == 1
    assert recover_t((2, -1), QUARTER) == 0
    assert recover_t((F(3, 4), F(1, 4)), QUARTER) == 3
    with pytest.raises(MembershipError):
        recover_t((F(1, 2), 0), QUARTER)


@settings(max_examples=80, deadline=None)
@given(pq_vectors(max_q=500, nonzero_last=False), st.integers(0, 10**6), st.integers(-3, 3))
def test_recover_roundtrip(pq, t, z):
    p, q = pq
    xi = tuple(x + z for x in iterate(p, q, t))
    assert recover_t(xi, pq) == t % q


def test_approx_point_examples():
    ap = approx_point((F(1, 2), F(1, 2)), F(1, 64))
    assert in_S(ap.xi) and ap.basis.contains(ap.xi)
    assert c_point(F(1, 4), 3) == (F(1, 4), F(1, 4), F(3, 4))
    res = approx_add((F(1, 2), F(1, 2)), F(1, 64))
    assert res.n_value == F(1, 2)
    assert approx_mult(QUARTER, F(1, 4)).t == 1
    # fallback of the multiplicative route for nu = 1/5 is t0 = 4
    assert approx_mult(((1, 1), 5), F(1, 5)).extra["fallback_t"] == 4
    assert approx_mult(((3, 3), 5), F(1, 5)).extra["fallback_t"] == 1


@settings(max_examples=25, deadline=None)
@given(pq_vectors(dims=(2, 3), max_q=64))
def test_guarantees(pq):
    p, q = pq
    d = len(p)
    eps = F(1, q)
    tau = covering_radius_bounds(basis_from_pq(p, q), F(1, 1000))
    ap = approx_point(pq, eps)
    assert all(check_theorem2(ap, tau, eps).values())
    assert check_corollary1(approx_mult(pq, eps), tau.upper, eps)
    add = approx_add(pq, eps)
    assert check_corollary2(add, tau.upper, eps)
    madd = strategy_add_exact(pq).n_value
    assert check_proposition1(strategy_mult_exact(pq).r_ratio, d, tau.upper)
    assert check_proposition2(madd, d, tau.upper)
    if add.rounding > 0:
        assert check_proposition3(add, madd, tau.upper, q)


def test_run_strategy_attaches_cut():
    inst = IlpInstance((1, 1), ((2, 3), (3, 1)), (5, 4))
    cg = CgCut.from_multiplier((F(1, 5), F(2, 5)), inst)
    for s in (0, 1, 2, 3, 4, 5, "approx-mult", "approx-add"):
        r = run_strategy(s, cg)
        if r.t:
            assert r.cut is not None and r.cut.t == r.t
            assert r.cut.mu == tuple(mod1(tuple(r.t * x for x in cg.lam)))
    with pytest.raises(ValueError):
        run_strategy("bogus", cg)
