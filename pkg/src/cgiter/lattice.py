"""Exact lattice toolkit for ``L = Z^d + Z nu``.

Bases are stored as lists of column vectors (tuples of Fractions). Every
quantity is exact; enumeration-based routines are guarded to small
dimensions because their cost grows exponentially.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (common_form, dot, floor, norm_sq, sqrt_bounds, sub, vec)

ENUM_MAX_DIM = 10
COVER_MAX_DIM = 4
HALF = Fraction(1, 2)


class CapabilityError(RuntimeError):
    """Requested computation is beyond the dimension guard."""


class PreconditionError(ValueError):
    pass


def _round(x: Fraction) -> int:
    return floor(x + HALF)


def gram_schmidt(vectors: Sequence[Sequence[Fraction]]):
    """Return ``(bstar, mu, B)`` with ``B[i] = |bstar_i|^2``."""
    bstar, mu, B = [], [], []
    for i, b in enumerate(vectors):
        v = list(b)
        row = []
        for j in range(i):
            m = dot(b, bstar[j]) / B[j]
            row.append(m)
            v = [a - m * c for a, c in zip(v, bstar[j])]
        v = tuple(v)
        bstar.append(v)
        mu.append(row)
        B.append(norm_sq(v))
    return bstar, mu, B


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination."""
    M = [list(map(Fraction, r)) for r in rows]
    n = len(M)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            out = -out
        p = M[c][c]
        out *= p
        for r in range(c + 1, n):
            f = M[r][c] / p
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return out


def inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    M = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [a / p for a in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def _transpose(cols):
    return [list(r) for r in zip(*cols)]


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank lattice basis; GSO data is computed once at construction."""

    vectors: tuple
    bstar: tuple = field(init=False, repr=False, compare=False)
    mu: tuple = field(init=False, repr=False, compare=False)
    B: tuple = field(init=False, repr=False, compare=False)
    det_abs: Fraction = field(init=False, compare=False)

    def __post_init__(self):
        vs = tuple(vec(v) for v in self.vectors)
        if not vs or any(len(v) != len(vs) for v in vs):
            raise ValueError("need d vectors of dimension d")
        object.__setattr__(self, "vectors", vs)
        bstar, mu, B = gram_schmidt(vs)
        if any(x == 0 for x in B):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "bstar", tuple(bstar))
        object.__setattr__(self, "mu", tuple(tuple(r) for r in mu))
        object.__setattr__(self, "B", tuple(B))
        prod = Fraction(1)
        for x in B:
            prod *= x
        lo, hi = sqrt_bounds(prod)
        if lo != hi:  # cannot happen for a square rational matrix, det^2 = prod
            raise AssertionError("Gram determinant is not a rational square")
        object.__setattr__(self, "det_abs", lo)

    @property
    def d(self) -> int:
        return len(self.vectors)

    def matrix_rows(self) -> list[list[Fraction]]:
        """Basis matrix with the basis vectors as columns, row-major."""
        return _transpose(self.vectors)

    def combine(self, coeffs: Sequence[int]) -> tuple:
        out = [Fraction(0)] * self.d
        for c, b in zip(coeffs, self.vectors):
            if c:
                out = [a + c * x for a, x in zip(out, b)]
        return tuple(out)

    def coordinates(self, x: Sequence) -> tuple:
        """Solve ``B y = x`` exactly."""
        inv = inverse(self.matrix_rows())
        return tuple(dot(r, x) for r in inv)

    def contains(self, x: Sequence) -> bool:
        return all(y.denominator == 1 for y in self.coordinates(vec(x)))

    def same_lattice(self, other: "LatticeBasis") -> bool:
        return all(other.contains(v) for v in self.vectors) and all(self.contains(v) for v in other.vectors)


def gso_check(L: LatticeBasis) -> bool:
    """``b_i = bstar_i + sum_j mu_ij bstar_j`` and pairwise orthogonality."""
    for i, b in enumerate(L.vectors):
        recon = list(L.bstar[i])
        for j in range(i):
            recon = [a + L.mu[i][j] * c for a, c in zip(recon, L.bstar[j])]
        if tuple(recon) != b:
            return False
    return all(dot(L.bstar[i], L.bstar[j]) == 0 for i in range(L.d) for j in range(i))


def hnf_columns(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Column-style Hermite normal form of a full-row-rank integer matrix.

    Returns the ``d`` nonzero columns (lower triangular, positive diagonal,
    off-diagonal entries reduced modulo the diagonal of their row).
    """
    rows = len(M)
    cols = [list(c) for c in zip(*M)]
    for i in range(rows):
        active = cols[i:]
        # gcd-combine row i into the first active column, lowest index first
        while True:
            nz = [k for k, c in enumerate(active) if c[i] != 0]
            if not nz:
                raise ValueError("matrix does not have full row rank")
            piv = min(nz, key=lambda k: (abs(active[k][i]), k))
            if len(nz) == 1:
                break
            for k in nz:
                if k != piv:
                    f = active[k][i] // active[piv][i]
                    active[k] = [a - f * b for a, b in zip(active[k], active[piv])]
        active[0], active[piv] = active[piv], active[0]
        if active[0][i] < 0:
            active[0] = [-a for a in active[0]]
        cols[i:] = active
        for k in range(i):
            f = cols[k][i] // cols[i][i]
            if f:
                cols[k] = [a - f * b for a, b in zip(cols[k], cols[i])]
    return cols[:rows]


def basis_from_pq(p: Sequence[int], q: int) -> LatticeBasis:
    """Basis of ``Z^d + Z (p/q)`` via the HNF of ``q * G(nu) = [q I | p]``."""
    p = tuple(int(v) for v in p)
    if q <= 0:
        raise PreconditionError("q must be positive")
    if math.gcd(q, *p) != 1:
        raise PreconditionError(f"gcd(p, q) = {math.gcd(q, *p)} != 1; normalize first")
    d = len(p)
    G = [[q if j == i else 0 for j in range(d)] + [p[i]] for i in range(d)]
    cols = hnf_columns(G)
    return LatticeBasis(tuple(tuple(Fraction(a, q) for a in c) for c in cols))


def basis_from_nu(nu: Sequence) -> LatticeBasis:
    p, q = common_form(nu)
    return basis_from_pq(p, q)


def determinant(L: LatticeBasis) -> Fraction:
    return abs(det(L.matrix_rows()))


def is_lll_reduced(L: LatticeBasis, delta=Fraction(3, 4)) -> bool:
    delta = Fraction(delta)
    for i in range(L.d):
        if any(abs(m) > HALF for m in L.mu[i]):
            return False
    return all(L.B[k] >= (delta - L.mu[k][k - 1] ** 2) * L.B[k - 1] for k in range(1, L.d))


def lll_reduce(L: LatticeBasis, delta=Fraction(3, 4)) -> LatticeBasis:
    """Exact rational LLL (Cohen, Alg. 2.6.3 update rules)."""
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    b = [list(v) for v in L.vectors]
    n = len(b)
    mu = [list(r) + [Fraction(0)] * (n - len(r)) for r in L.mu]
    B = list(L.B)

    def reduce(k, j):
        r = _round(mu[k][j])
        if r:
            b[k] = [x - r * y for x, y in zip(b[k], b[j])]
            for i in range(j):
                mu[k][i] -= r * mu[j][i]
            mu[k][j] -= r

    k = 1
    while k < n:
        reduce(k, k - 1)
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            m = mu[k][k - 1]
            Bn = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / Bn
            B[k] = B[k - 1] * B[k] / Bn
            B[k - 1] = Bn
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                reduce(k, j)
            k += 1
    return LatticeBasis(tuple(tuple(v) for v in b))


def babai_nearest_plane(L: LatticeBasis, c: Sequence) -> tuple:
    w = list(vec(c))
    for j in range(L.d - 1, -1, -1):
        cj = _round(dot(w, L.bstar[j]) / L.B[j])
        if cj:
            w = [a - cj * x for a, x in zip(w, L.vectors[j])]
    return tuple(a - x for a, x in zip(vec(c), w))


def _int_window(center: Fraction, rad_sq: Fraction) -> range:
    """Integers ``x`` with ``(x - center)^2 <= rad_sq`` (possibly empty)."""
    if rad_sq < 0:
        return range(0)
    lo_r, hi_r = sqrt_bounds(rad_sq, 32)
    lo = floor(center - hi_r) - 1
    hi = floor(center + hi_r) + 1
    while lo <= hi and (lo - center) ** 2 > rad_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > rad_sq:
        hi -= 1
    return range(lo, hi + 1)


def _target_gso_coords(L: LatticeBasis, c):
    return [dot(c, L.bstar[j]) / L.B[j] for j in range(L.d)]


def enumerate_ball(L: LatticeBasis, center: Sequence, rad_sq) -> list[tuple[Fraction, tuple]]:
    """All lattice points ``v`` with ``|v - center|^2 <= rad_sq`` as ``(dist_sq, coeffs)``."""
    rad_sq = Fraction(rad_sq)
    d = L.d
    y = _target_gso_coords(L, vec(center))
    out = []
    x = [0] * d

    def rec(j, partial):
        cj = y[j] - sum((L.mu[i][j] * x[i] for i in range(j + 1, d)), Fraction(0))
        for xj in _int_window(cj, (rad_sq - partial) / L.B[j]):
            x[j] = xj
            part = partial + (xj - cj) ** 2 * L.B[j]
            if j == 0:
                out.append((part, tuple(x)))
            else:
                rec(j - 1, part)
        x[j] = 0

    rec(d - 1, Fraction(0))
    return out


def cvp_exact(L: LatticeBasis, c: Sequence) -> tuple[tuple, Fraction]:
    """Closest lattice vector by depth-first enumeration with a shrinking radius.

    Ties are broken towards the first point found, which is deterministic.
    """
    if L.d > ENUM_MAX_DIM:
        raise CapabilityError(f"exact CVP limited to d <= {ENUM_MAX_DIM}")
    c = vec(c)
    d = L.d
    start = babai_nearest_plane(L, c)
    best = [norm_sq(sub(start, c)), None]
    y = _target_gso_coords(L, c)
    x = [0] * d
    mu, B = L.mu, L.B

    def rec(j, partial):
        cj = y[j]
        for i in range(j + 1, d):
            if x[i]:
                cj -= mu[i][j] * x[i]
        # zig-zag from the nearest integer outward so the radius shrinks early
        cand = sorted(_int_window(cj, (best[0] - partial) / B[j]), key=lambda v: (abs(v - cj), v))
        for xj in cand:
            part = partial + (xj - cj) ** 2 * B[j]
            if part > best[0]:
                continue
            x[j] = xj
            if j == 0:
                if part < best[0] or best[1] is None:
                    best[0], best[1] = part, tuple(x)
            else:
                rec(j - 1, part)
        x[j] = 0

    rec(d - 1, Fraction(0))
    if best[1] is None:
        return start, best[0]
    return L.combine(best[1]), best[0]


def distance_sq(L: LatticeBasis, c: Sequence) -> Fraction:
    return cvp_exact(L, c)[1]


def shortest_vector(L: LatticeBasis) -> tuple[tuple, Fraction]:
    if L.d > ENUM_MAX_DIM:
        raise CapabilityError(f"enumeration limited to d <= {ENUM_MAX_DIM}")
    R = lll_reduce(L)
    bound = min(norm_sq(v) for v in R.vectors)
    pts = [(ds, x) for ds, x in enumerate_ball(R, (0,) * R.d, bound) if any(x)]
    ds, x = min(pts, key=lambda t: (t[0], t[1]))
    return R.combine(x), ds


def _rank(vectors) -> int:
    M = [list(v) for v in vectors]
    r = 0
    ncol = len(M[0]) if M else 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def successive_minima(L: LatticeBasis) -> list[Fraction]:
    """Squared successive minima, exact."""
    if L.d > ENUM_MAX_DIM:
        raise CapabilityError(f"enumeration limited to d <= {ENUM_MAX_DIM}")
    R = lll_reduce(L)
    bound = max(norm_sq(v) for v in R.vectors)
    pts = sorted((t for t in enumerate_ball(R, (0,) * R.d, bound) if any(t[1])), key=lambda t: (t[0], t[1]))
    chosen, mins = [], []
    for ds, x in pts:
        if _rank(chosen + [x]) > len(chosen):
            chosen.append(x)
            mins.append(ds)
            if len(chosen) == R.d:
                break
    return mins


def dual_basis(L: LatticeBasis) -> LatticeBasis:
    inv = inverse(L.matrix_rows())  # rows of B^{-1} are the columns of B^{-T}
    return LatticeBasis(tuple(tuple(r) for r in inv))


@dataclass(frozen=True)
class CoveringRadiusBounds:
    lower: Fraction
    upper: Fraction
    tol: Fraction
    deep_hole: tuple = field(default=(), compare=False)
    cells: int = field(default=0, compare=False)

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


def covering_radius_bounds(L: LatticeBasis, tol=Fraction(1, 1000), bits: int = 64,
                           max_cells: int = 2_000_000) -> CoveringRadiusBounds:
    """Certified bracket of the covering radius by Lipschitz branch and bound.

    The search domain is the fundamental parallelepiped of an LLL-reduced
    basis; the distance-to-lattice function is 1-Lipschitz, so a cell is
    bounded above by its center distance plus its circumradius.
    """
    if L.d > COVER_MAX_DIM:
        raise CapabilityError(f"covering radius search limited to d <= {COVER_MAX_DIM}")
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    R = lll_reduce(L)
    d = R.d
    b = R.vectors
    lengths = [norm_sq(v) for v in b]
    signs = [(1,) + s for s in itertools.product((1, -1), repeat=d - 1)]

    def circum_sq(h):
        best = Fraction(0)
        for s in signs:
            v = [Fraction(0)] * d
            for si, hi, bi in zip(s, h, b):
                v = [a + si * hi * x for a, x in zip(v, bi)]
            best = max(best, norm_sq(v))
        return best

    def evaluate(lo, h):
        mid = [l + w for l, w in zip(lo, h)]
        x = _combine_frac(R, mid)
        ds = distance_sq(R, x)
        upper = sqrt_bounds(ds, bits)[1] + sqrt_bounds(circum_sq(h), bits)[1]
        return ds, x, upper

    lower_sq = Fraction(-1)
    hole = ()
    heap = []
    counter = itertools.count()

    def push(lo, h):
        nonlocal lower_sq, hole
        ds, x, up = evaluate(lo, h)
        if ds > lower_sq:
            lower_sq, hole = ds, x
        heapq.heappush(heap, (-up, next(counter), lo, h))

    push([Fraction(0)] * d, [HALF] * d)
    cells = 1
    while True:
        neg_up, _, lo, h = heap[0]
        upper = -neg_up
        lower = sqrt_bounds(lower_sq, bits)[0]
        if upper - lower <= tol:
            return CoveringRadiusBounds(lower, upper, tol, hole, cells)
        if cells >= max_cells:
            raise CapabilityError("covering radius search exceeded its cell budget")
        heapq.heappop(heap)
        # split the edge that is longest in space
        k = max(range(d), key=lambda i: (h[i] ** 2 * lengths[i], -i))
        h2 = list(h)
        h2[k] = h[k] / 2
        lo2 = list(lo)
        lo2[k] = lo[k] + h[k]
        push(list(lo), h2)
        push(lo2, list(h2))
        cells += 2


def _combine_frac(R: LatticeBasis, coeffs):
    out = [Fraction(0)] * R.d
    for c, bv in zip(coeffs, R.vectors):
        out = [a + c * x for a, x in zip(out, bv)]
    return tuple(out)


def contains_integer_lattice(L: LatticeBasis) -> bool:
    d = L.d
    return all(L.contains(tuple(Fraction(int(i == j)) for j in range(d))) for i in range(d))
