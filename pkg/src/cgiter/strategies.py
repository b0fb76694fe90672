"""Rules for choosing the iterate ``t`` of a CG-cut.

Strategies 0-3 look only at the rounding effect ``{t nu}``. Strategies 4
and 5 minimize, over all iterates with positive rounding effect, the
ratio ``|t lam mod 1| / {t nu}`` and the distance-like ``N(t nu mod 1)``
respectively; they are solved exactly by enumeration or approximately with
the lattice algorithm in :func:`approx_point`.

Throughout, ``nu`` denotes the augmented vector ``(lam_1, ..., lam_m, nu)``
of dimension ``d = m + 1``, stored as integer numerators ``p`` over a
common denominator ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import Interval, as_rational, common_form, frac, mod1, norm_sq, sqrt_bounds
from .cuts import CgCut, IteratedCut, TrivialCutError, iterate_cut
from .lattice import (CoveringRadiusBounds, LatticeBasis, PreconditionError, babai_nearest_plane,
                      basis_from_pq, lll_reduce)

#: exact strategies enumerate all t = 1..q-1 up to this denominator
ENUM_GUARD = 10**7
_CHUNK = 1 << 17

STRATEGY_IDS = (0, 1, 2, 3, 4, 5, "approx-mult", "approx-add")


class EnumerationGuardError(RuntimeError):
    """The denominator is too large for exhaustive enumeration."""


class UndefinedRatioError(ValueError):
    pass


class MembershipError(ValueError):
    pass


@dataclass(frozen=True)
class StrategyResult:
    strategy_id: object
    t: int
    xi: tuple
    rounding: Fraction
    r_ratio: Fraction | None  # squared
    n_value: Fraction  # squared
    cut: IteratedCut | None = None
    approx: bool = False
    trivial: bool = False
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GeomBound:
    """``a(d, R)`` and the squared radius ``r(d, R)^2`` as certified brackets."""

    d: int
    R: Fraction
    a_lo: Fraction | None
    a_hi: Fraction | None
    r_sq_lo: Fraction | None  # None means +infinity
    r_sq_hi: Fraction | None

    @property
    def finite(self) -> bool:
        return self.r_sq_hi is not None

    @property
    def exact(self) -> bool:
        return self.finite and self.a_lo == self.a_hi

    @property
    def a_val(self) -> Fraction | None:
        return None if self.a_lo is None else (self.a_lo + self.a_hi) / 2

    @property
    def r_sq(self) -> Fraction | None:
        return None if self.r_sq_lo is None else (self.r_sq_lo + self.r_sq_hi) / 2


# -- elementary quantities -------------------------------------------------

def n_of(xi: Sequence) -> Fraction:
    """Squared ``N(x) = |(x_1, ..., x_{d-1}, 1 - x_d)|``."""
    if len(xi) < 2:
        raise ValueError("N is defined for d >= 2")
    return norm_sq(xi[:-1]) + (1 - Fraction(xi[-1])) ** 2


def r_of(xi: Sequence) -> Fraction:
    """Squared ratio ``|pi_d(xi)| / xi_d``."""
    last = Fraction(xi[-1])
    if last == 0:
        raise UndefinedRatioError("ratio undefined for xi_d = 0")
    return norm_sq(xi[:-1]) / (last * last)


def _augmented(cg) -> tuple[tuple[int, ...], int]:
    if isinstance(cg, CgCut):
        return cg.p_aug, cg.q
    if isinstance(cg, tuple) and len(cg) == 2 and isinstance(cg[1], int) and not isinstance(cg[0], (int, Fraction)):
        p, q = cg
        return tuple(int(v) for v in p), q
    return common_form([as_rational(v) for v in cg])


def _result(sid, t, p, q, cg, approx=False, extra=None) -> StrategyResult:
    xi = tuple(Fraction(t * pi % q, q) for pi in p)
    rounding = xi[-1]
    cut = None
    if isinstance(cg, CgCut) and cg.inst is not None and t % q:
        cut = iterate_cut(cg, t)
    return StrategyResult(
        strategy_id=sid, t=t, xi=xi, rounding=rounding,
        r_ratio=r_of(xi) if rounding else None, n_value=n_of(xi),
        cut=cut, approx=approx, trivial=rounding == 0, extra=extra or {})


def _nu_parts(p, q):
    """The rounding effect ``p_d / q`` in lowest terms ``a / b``."""
    g = math.gcd(p[-1], q)
    return p[-1] // g, q // g


# -- strategies 0-3 ----------------------------------------------------------

def strategy_basic(kind: int, cg) -> StrategyResult:
    """Strategy 0 (t=1), 1 (multiply up), 2 (negate) or 3 (max rounding)."""
    p, q = _augmented(cg)
    a, b = _nu_parts(p, q)
    if a == 0:
        raise TrivialCutError("rounding effect is zero")
    nu = Fraction(a, b)
    if kind == 0:
        t = 1
    elif kind == 1:
        t = 1 if nu >= Fraction(1, 2) else (b - 1) // a
    elif kind == 2:
        t = 1 if nu >= Fraction(1, 2) else q - 1
    elif kind == 3:
        # {t a / b} is maximal, = (b-1)/b, for the least t with t a = -1 mod b
        t = (-pow(a, -1, b)) % b if b > 1 else 1
    else:
        raise ValueError(f"unknown basic strategy {kind!r}")
    return _result(kind, t, p, q, cg)


# -- exact strategies 4 and 5 ----------------------------------------------

def _chunks(q):
    for start in range(1, q, _CHUNK):
        yield np.arange(start, min(q, start + _CHUNK), dtype=np.int64)


def _check_guard(q, guard):
    if q > guard:
        raise EnumerationGuardError(f"q = {q} exceeds the enumeration guard {guard}; use the approximation")


def _mult_argmin(p, q) -> int | None:
    """Least ``t`` minimizing ``S(t) / u(t)^2`` over ``u(t) > 0``.

    ``S`` is the squared norm numerator and ``u`` the rounding numerator,
    both integers. A float64 screen keeps only near-minimal candidates,
    then the winner is decided with exact integer cross-multiplication.
    """
    P = np.asarray(p, dtype=np.int64)
    best = None  # (S, u, t)
    for t in _chunks(q):
        R = (t[:, None] * P[None, :]) % q
        u = R[:, -1]
        ok = u > 0
        if not ok.any():
            continue
        S = (R[:, :-1] ** 2).sum(axis=1)
        ratio = np.full(len(t), np.inf)
        ratio[ok] = S[ok].astype(np.float64) / (u[ok].astype(np.float64) ** 2)
        lo = ratio.min()
        cand = np.nonzero(ratio <= lo * (1 + 1e-9) + 1e-300)[0]
        for i in cand:
            s_i, u_i, t_i = int(S[i]), int(u[i]), int(t[i])
            if best is None or s_i * best[1] ** 2 < best[0] * u_i**2:
                best = (s_i, u_i, t_i)
    return None if best is None else best[2]


def _add_argmin(p, q) -> int | None:
    """Least ``t`` minimizing ``q^2 N^2 = S(t) + (q - u(t))^2`` over ``u(t) > 0``; int64 exact."""
    P = np.asarray(p, dtype=np.int64)
    best = None  # (value, t)
    for t in _chunks(q):
        R = (t[:, None] * P[None, :]) % q
        u = R[:, -1]
        val = (R[:, :-1] ** 2).sum(axis=1) + (q - u) ** 2
        val = np.where(u > 0, val, np.iinfo(np.int64).max)
        i = int(np.argmin(val))
        if u[i] > 0 and (best is None or int(val[i]) < best[0]):
            best = (int(val[i]), int(t[i]))
    return None if best is None else best[1]


def strategy_mult_exact(cg, guard: int = ENUM_GUARD) -> StrategyResult:
    p, q = _augmented(cg)
    _check_guard(q, guard)
    t = _mult_argmin(p, q)
    if t is None:
        raise TrivialCutError("no iterate has a positive rounding effect")
    return _result(4, t, p, q, cg)


def strategy_add_exact(cg, guard: int = ENUM_GUARD) -> StrategyResult:
    p, q = _augmented(cg)
    _check_guard(q, guard)
    t = _add_argmin(p, q)
    if t is None:
        raise TrivialCutError("no iterate has a positive rounding effect")
    return _result(5, t, p, q, cg)


def m_add(cg) -> Fraction:
    """Squared optimum of the additive problem."""
    return strategy_add_exact(cg).n_value


# -- closed-form geometry ----------------------------------------------------

def geom_r(d: int, R, bits: int = 128) -> GeomBound:
    """``a(d, R)`` and ``r(d, R)^2``; the largest ``r(x)`` over ``B(c(R), R)``."""
    R = as_rational(R)
    if R <= 0:
        raise ValueError("R must be positive")
    if d < 2:
        raise ValueError("d must be at least 2")
    if R >= Fraction(1, 2):
        return GeomBound(d, R, None, None, None, None)
    inner = (d - 1) * R * R - 2 * R + 1
    denom = d * R * R - 2 * R + 1
    s_lo, s_hi = sqrt_bounds(inner, bits)
    e_lo, e_hi = sqrt_bounds(d - 1, bits)
    a_lo = ((1 - R) * s_lo - e_hi * R * R) / denom
    a_hi = ((1 - R) * s_hi - e_lo * R * R) / denom
    if a_lo <= 0:
        raise ArithmeticError("precision too low to separate a(d, R) from zero")
    return GeomBound(d, R, a_lo, a_hi, 1 / (a_hi * a_hi) - 1, 1 / (a_lo * a_lo) - 1)


def c_point(r, d: int) -> tuple:
    """``c(r) = (r, ..., r, 1 - r)``."""
    r = as_rational(r)
    return (r,) * (d - 1) + (1 - r,)


def in_S(x: Sequence) -> bool:
    """Membership in ``[0, inf)^{d-1} x (-inf, 1)``."""
    return all(v >= 0 for v in x[:-1]) and x[-1] < 1


# -- approximation algorithm --------------------------------------------------

@dataclass(frozen=True)
class ApproxPoint:
    xi: tuple
    r_plus: Fraction
    r_minus: Fraction
    basis: LatticeBasis = field(repr=False)
    updated: bool = True


def _standard_pq(nu) -> tuple[tuple[int, ...], int]:
    p, q = _augmented(nu)
    if any(not 0 <= v < q for v in p):
        raise PreconditionError("entries of nu must lie in [0, 1)")
    if len(p) < 2:
        raise PreconditionError("need d >= 2")
    return p, q


def approx_point(nu, eps) -> ApproxPoint:
    """Binary search for ``r`` with Babai's nearest plane at ``c(r)``.

    Returns the last Babai point that landed in ``S``. If no probe ever lands
    in ``S`` the point stays at the integral ``c(1)`` and ``updated`` is False.
    """
    eps = as_rational(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    p, q = _standard_pq(nu)
    d = len(p)
    L = lll_reduce(basis_from_pq(p, q))
    r_minus, r_plus = Fraction(0), Fraction(1)
    xi = c_point(1, d)
    updated = False
    while r_plus - r_minus > eps:
        m = (r_minus + r_plus) / 2
        chi = babai_nearest_plane(L, c_point(m, d))
        if in_S(chi):
            r_plus, xi, updated = m, chi, True
        else:
            r_minus = m
    return ApproxPoint(xi, r_plus, r_minus, L, updated)


def recover_t(xi: Sequence, nu, q: int | None = None) -> int:
    """The unique ``t`` in ``0..q-1`` with ``xi = t nu (mod Z^d)``.

    Each coordinate gives a congruence ``t p_i = q xi_i (mod q)``; these are
    merged by the generalized Chinese remainder theorem.
    """
    p, q0 = _augmented(nu)
    if q is not None and q != q0:
        raise PreconditionError(f"nu has denominator {q0}, not {q}")
    q = q0
    xi = [as_rational(v) for v in xi]
    t, mod = 0, 1  # solution set t = t (mod mod)
    for pi, x in zip(p, xi):
        c = x * q
        if c.denominator != 1:
            raise MembershipError("point is not in Z^d + Z nu")
        c = int(c) % q
        g = math.gcd(pi, q)
        if c % g:
            raise MembershipError("point is not in Z^d + Z nu")
        mi = q // g
        ti = (c // g) * pow(pi // g, -1, mi) % mi if mi > 1 else 0
        # combine t = t (mod mod) with t = ti (mod mi)
        g2 = math.gcd(mod, mi)
        if (ti - t) % g2:
            raise MembershipError("point is not in Z^d + Z nu")
        lcm = mod // g2 * mi
        k = ((ti - t) // g2) * pow(mod // g2, -1, mi // g2) % (mi // g2) if mi // g2 > 1 else 0
        t = (t + mod * k) % lcm
        mod = lcm
    if mod != q:  # cannot happen for gcd(p, q) = 1
        raise MembershipError("iterate index is not unique")
    return t


def _mult_fallback_t(p, q) -> int:
    a, b = _nu_parts(p, q)
    nu = Fraction(a, b)
    if nu >= Fraction(1, 2):
        return 1
    f = b // a  # floor(1 / nu)
    return f - 1 if f * nu == 1 else f


def approx_mult(nu, eps) -> StrategyResult:
    """Better of the lattice point and the ``{t0 nu} >= 1/2`` fallback iterate."""
    p, q = _standard_pq(nu)
    if p[-1] == 0:
        raise TrivialCutError("rounding effect is zero")
    ap = approx_point(nu, eps)
    fallback = _result("approx-mult", _mult_fallback_t(p, q), p, q, nu, approx=True)
    t = recover_t(mod1(ap.xi), (p, q))
    chosen = fallback
    source = "fallback"
    if t:
        lat = _result("approx-mult", t, p, q, nu, approx=True)
        if lat.r_ratio is not None and (lat.r_ratio, lat.t) < (fallback.r_ratio, fallback.t):
            chosen, source = lat, "lattice"
    extra = {"r_plus": ap.r_plus, "lattice_point": ap.xi, "lattice_t": t,
             "fallback_t": fallback.t, "source": source}
    return StrategyResult(**{**chosen.__dict__, "extra": extra})


def approx_add(nu, delta) -> StrategyResult:
    """Lattice point for ``eps = delta / ceil(sqrt d)``, reduced mod 1."""
    delta = as_rational(delta)
    p, q = _standard_pq(nu)
    d = len(p)
    root = math.isqrt(d)
    eps = delta / (root if root * root == d else root + 1)
    ap = approx_point(nu, eps)
    xi = mod1(ap.xi)
    t = recover_t(xi, (p, q))
    extra = {"r_plus": ap.r_plus, "eps": eps, "lattice_point": ap.xi}
    if t == 0:
        return StrategyResult("approx-add", 0, xi, Fraction(0), None, n_of(xi),
                              approx=True, trivial=True, extra=extra)
    res = _result("approx-add", t, p, q, nu, approx=True)
    return StrategyResult(**{**res.__dict__, "extra": extra})


def run_strategy(strategy, cg, eps=None, delta=None, guard: int = ENUM_GUARD) -> StrategyResult:
    """Dispatch by strategy id; approximations attach the iterated cut when possible."""
    if strategy in (0, 1, 2, 3):
        return strategy_basic(strategy, cg)
    if strategy == 4:
        return strategy_mult_exact(cg, guard)
    if strategy == 5:
        return strategy_add_exact(cg, guard)
    p, q = _augmented(cg)
    eps = Fraction(1, q) if eps is None else as_rational(eps)
    delta = Fraction(1, q) if delta is None else as_rational(delta)
    if q == 1:
        eps = delta = Fraction(1, 2)
    if strategy == "approx-mult":
        res = approx_mult(cg if not isinstance(cg, CgCut) else (cg.p_aug, cg.q), eps)
    elif strategy == "approx-add":
        res = approx_add(cg if not isinstance(cg, CgCut) else (cg.p_aug, cg.q), delta)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(cg, CgCut) and cg.inst is not None and res.t:
        res = StrategyResult(**{**res.__dict__, "cut": iterate_cut(cg, res.t)})
    return res


# -- guarantee checks (certified against covering-radius brackets) ---------

def _pow2_half(d: int) -> Interval:
    """``2^{d/2}`` as an interval."""
    return Interval.sqrt(Fraction(2**d))


def check_theorem2(ap: ApproxPoint, tau: CoveringRadiusBounds, eps) -> dict:
    eps = as_rational(eps)
    d = len(ap.xi)
    U = tau.upper
    ball = norm_sq([a - b for a, b in zip(ap.xi, c_point(ap.r_plus, d))]) <= 2**d * U * U
    slack = ap.r_plus - eps
    radius = slack <= 0 or slack * slack <= 2**d * U * U
    member = in_S(ap.xi) and ap.basis.contains(ap.xi)
    return {"in_S_and_L": member, "ball": ball, "radius": radius, "r_plus_positive": ap.r_plus > 0}


def check_corollary1(res: StrategyResult, tau_upper, eps) -> bool:
    """``r^2 < 4 (d - 1)`` and ``r^2 < r(d, 2^{d/2} tau + eps)^2``, conservatively."""
    d = len(res.xi)
    if res.r_ratio is None or not res.r_ratio < 4 * (d - 1):
        return False
    R = _pow2_half(d) * as_rational(tau_upper) + as_rational(eps)
    if R.lo >= Fraction(1, 2):
        return True  # first term is +infinity
    # r(d, .) increases with R, so the lower end of the bracket is the safe side
    return res.r_ratio < geom_r(d, R.lo).r_sq_lo


def check_corollary2(res: StrategyResult, tau_upper, delta) -> bool:
    d = len(res.xi)
    bound = (1 + Interval.sqrt(d)) * _pow2_half(d) * as_rational(tau_upper) + as_rational(delta)
    return res.n_value < bound.lo**2


def check_proposition3(res_add: StrategyResult, madd_sq: Fraction, tau_upper, q: int) -> bool:
    """``N(xi_add) / m_add < 2^{3d/2-1} (1 + sqrt d) tau^d q + 1``."""
    d = len(res_add.xi)
    lhs = Interval.sqrt(res_add.n_value / madd_sq)
    rhs = Interval.sqrt(Fraction(2 ** (3 * d - 2))) * (1 + Interval.sqrt(d)) * (as_rational(tau_upper) ** d) * q + 1
    return lhs.certainly_lt(rhs)


def check_proposition1(r_sq_opt: Fraction, d: int, tau_upper) -> bool:
    """``min r^2 <= min(r(d, tau)^2, 4 (d - 1))`` using the upper end of tau."""
    if r_sq_opt > 4 * (d - 1):
        return False
    g = geom_r(d, tau_upper)
    return (not g.finite) or r_sq_opt <= g.r_sq_lo


def check_proposition2(madd_sq: Fraction, d: int, tau_upper) -> bool:
    bound = (1 + Interval.sqrt(d)) * as_rational(tau_upper)
    return madd_sq <= bound.lo**2
