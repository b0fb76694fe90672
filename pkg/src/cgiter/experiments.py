"""Experiment harness: random ILPs and the strategy comparison table, iterate
point sets, and the Monte-Carlo study of covering radii of random ``L_a``.

Randomness comes from numpy's counter-based Philox generator, keyed by
``(seed, tag, ...)`` through :class:`numpy.random.SeedSequence`, so every
cell and every sample stream is reproducible on its own.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import Interval, as_rational, ceil, common_form, fmt, frac, root_bounds, to_decimal
from .cuts import cuts_from_solution
from .lattice import CapabilityError, basis_from_pq, covering_radius_bounds
from .lp import IlpInstance, InvalidCutError, resolve_with_cut, solve_ilp, solve_lp
from .strategies import ENUM_GUARD, run_strategy

log = logging.getLogger(__name__)

TABLE_STRATEGIES = (0, 1, 2, 3, 4, 5)
_TAG_INSTANCE = 1
_TAG_PRIMITIVE = 2


class NoGapError(ValueError):
    pass


class EmptySetError(ValueError):
    pass


def make_rng(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


def thread_count() -> int:
    """Worker count from ``CG_ITERATE_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("CG_ITERATE_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class ExperimentConfig:
    m_values: tuple = (5, 10, 15)
    n_values: tuple = (10, 20, 30)
    instances_per_cell: int = 5
    coeff_max: int = 5
    zero_prob: Fraction = Fraction(1, 2)
    det_cap: int = 2 * 10**6
    seed: int = 0
    enum_guard: int = ENUM_GUARD

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(v) for v in self.m_values))
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        object.__setattr__(self, "zero_prob", as_rational(self.zero_prob))
        if min(self.m_values + self.n_values) <= 0 or self.instances_per_cell <= 0:
            raise ValueError("counts must be positive")
        if self.coeff_max <= 0 or self.det_cap <= 0:
            raise ValueError("coeff_max and det_cap must be positive")
        if not 0 <= self.zero_prob <= 1:
            raise ValueError("zero_prob must lie in [0, 1]")
        if self.zero_prob == 1:
            raise ValueError("zero_prob = 1 can never give columns with two nonzeros")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "zero_prob" in data:
            data["zero_prob"] = as_rational(str(data["zero_prob"]))
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["m_values"], out["n_values"] = list(self.m_values), list(self.n_values)
        out["zero_prob"] = fmt(self.zero_prob)
        return out


# -- instances -----------------------------------------------------------------

def gen_instance(m: int, n: int, cfg: ExperimentConfig = ExperimentConfig(), cell_seed: int = 0) -> IlpInstance:
    """Random ``max c^T x, A x <= b`` in the style of the strategy experiments.

    ``c_j`` uniform in ``1..coeff_max``; each ``A_ij`` is zero with
    probability ``zero_prob`` and otherwise uniform in ``1..coeff_max``;
    columns with fewer than two nonzeros are redrawn; ``b_i`` is the
    ceiling of half the ``i``-th row sum.
    """
    rng = make_rng(cfg.seed, _TAG_INSTANCE, m, n, cell_seed)
    zp = cfg.zero_prob
    c = [int(v) for v in rng.integers(1, cfg.coeff_max + 1, size=n)]
    cols = []
    for _ in range(n):
        while True:
            # exact Bernoulli(zero_prob): compare a uniform integer with the numerator
            zero = rng.integers(0, zp.denominator, size=m) < zp.numerator
            vals = rng.integers(1, cfg.coeff_max + 1, size=m)
            col = [0 if z else int(v) for z, v in zip(zero, vals)]
            if sum(1 for v in col if v) >= 2:
                cols.append(col)
                break
    A = [[cols[j][i] for j in range(n)] for i in range(m)]
    b = [ceil(Fraction(sum(row), 2)) for row in A]
    return IlpInstance(tuple(c), tuple(map(tuple, A)), tuple(b))


def gap_closed(inst: IlpInstance, pi: Sequence[int], pi0: int,
               z_lp: Fraction | None = None, z_ilp: Fraction | None = None) -> Fraction:
    """``100 (z_LP - z_cut) / (z_LP - z_ILP)`` for a single appended cut."""
    if z_lp is None:
        z_lp = solve_lp(inst).objective
    if z_ilp is None:
        z_ilp = solve_ilp(inst)[0]
    if z_lp == z_ilp:
        raise NoGapError("LP and ILP optima coincide")
    z_cut = resolve_with_cut(inst, pi, pi0)
    g = 100 * (z_lp - z_cut) / (z_lp - z_ilp)
    if not 0 <= g <= 100:
        raise InvalidCutError(f"gap closed {g} outside [0, 100]; the cut is not valid")
    return g


@dataclass
class InstanceRecord:
    m: int
    n: int
    k: int
    status: str  # "ok", "discarded", "integral"
    basis_det: int = 0
    z_lp: Fraction | None = None
    z_ilp: Fraction | None = None
    cuts: int = 0
    approx: bool = False
    # strategy -> list of per-cut gap percentages
    gaps: dict = field(default_factory=dict)

    def average(self, s) -> Fraction:
        g = self.gaps[s]
        return sum(g, Fraction(0)) / len(g)


def evaluate_instance(inst: IlpInstance, cfg: ExperimentConfig, m=0, n=0, k=0,
                      strategies=TABLE_STRATEGIES) -> InstanceRecord:
    sol = solve_lp(inst)
    rec = InstanceRecord(m, n, k, "ok", basis_det=sol.basis_det, z_lp=sol.objective)
    if sol.basis_det > cfg.det_cap:
        rec.status = "discarded"
        return rec
    cgs = cuts_from_solution(sol, inst)
    if not cgs:
        rec.status = "integral"
        return rec
    rec.z_ilp = solve_ilp(inst)[0]
    if rec.z_ilp == rec.z_lp:
        rec.status = "integral"
        return rec
    cache: dict = {}
    rec.gaps = {s: [] for s in strategies}
    for cg in cgs:
        for s in strategies:
            use = s
            if s in (4, 5) and cg.q > cfg.enum_guard:
                use = "approx-mult" if s == 4 else "approx-add"
                rec.approx = True
            res = run_strategy(use, cg, guard=cfg.enum_guard)
            if res.cut is None:
                # trivial iterate: no cut, nothing closed
                rec.gaps[s].append(Fraction(0))
                continue
            key = (res.cut.pi, res.cut.pi0)
            if key not in cache:
                cache[key] = gap_closed(inst, *key, z_lp=rec.z_lp, z_ilp=rec.z_ilp)
            rec.gaps[s].append(cache[key])
    rec.cuts = len(cgs)
    return rec


def _evaluate_cell(args) -> InstanceRecord:
    m, n, k, cfg = args
    inst = gen_instance(m, n, cfg, k)
    rec = evaluate_instance(inst, cfg, m, n, k)
    log.info("instance m=%d n=%d k=%d: %s (det %d, %d cuts)", m, n, k, rec.status, rec.basis_det, rec.cuts)
    return rec


@dataclass
class Table1:
    cfg: ExperimentConfig
    records: list
    cells: dict  # (m, n) -> {s: Fraction} or None
    overall: dict  # s -> Fraction

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["m", "n", "instances", "cuts", "approx"]
        for s in TABLE_STRATEGIES:
            header += [f"A{s}", f"A{s}_dec"]
        w.writerow(header)
        for (m, n), avg in self.cells.items():
            recs = [r for r in self.records if (r.m, r.n) == (m, n) and r.status == "ok"]
            row = [m, n, len(recs), sum(r.cuts for r in recs), str(any(r.approx for r in recs)).lower()]
            for s in TABLE_STRATEGIES:
                row += [fmt(avg[s]), to_decimal(avg[s])] if avg else ["", ""]
            w.writerow(row)
        ok = [r for r in self.records if r.status == "ok"]
        row = ["all", "all", len(ok), sum(r.cuts for r in ok), str(any(r.approx for r in ok)).lower()]
        for s in TABLE_STRATEGIES:
            row += [fmt(self.overall[s]), to_decimal(self.overall[s])] if self.overall else ["", ""]
        w.writerow(row)
        return buf.getvalue()

    def detail_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["m", "n", "k", "status", "basis_det", "z_lp", "z_ilp", "cuts", "approx"]
        for s in TABLE_STRATEGIES:
            header += [f"A{s}", f"A{s}_dec"]
        w.writerow(header)
        for r in self.records:
            row = [r.m, r.n, r.k, r.status, r.basis_det, fmt(r.z_lp) if r.z_lp is not None else "",
                   fmt(r.z_ilp) if r.z_ilp is not None else "", r.cuts, str(r.approx).lower()]
            for s in TABLE_STRATEGIES:
                if r.status == "ok":
                    a = r.average(s)
                    row += [fmt(a), to_decimal(a)]
                else:
                    row += ["", ""]
            w.writerow(row)
        return buf.getvalue()


def run_table1(cfg: ExperimentConfig = ExperimentConfig(), workers: int | None = None) -> Table1:
    jobs = [(m, n, k, cfg) for m in cfg.m_values for n in cfg.n_values
            for k in range(1, cfg.instances_per_cell + 1)]
    workers = thread_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_evaluate_cell, jobs))
    else:
        records = [_evaluate_cell(j) for j in jobs]
    records.sort(key=lambda r: (r.m, r.n, r.k))
    cells = {}
    for m in cfg.m_values:
        for n in cfg.n_values:
            ok = [r for r in records if (r.m, r.n) == (m, n) and r.status == "ok"]
            cells[(m, n)] = ({s: sum((r.average(s) for r in ok), Fraction(0)) / len(ok)
                              for s in TABLE_STRATEGIES} if ok else None)
    filled = [v for v in cells.values() if v]
    overall = ({s: sum((c[s] for c in filled), Fraction(0)) / len(filled) for s in TABLE_STRATEGIES}
               if filled else {})
    return Table1(cfg, records, cells, overall)


# -- iterate point sets --------------------------------------------------------

def emit_iterates(nu, q: int | None = None) -> list[tuple]:
    """All points ``t nu mod 1`` for ``t = 1..q-1``; ``q`` defaults to the common denominator."""
    p, q0 = common_form([as_rational(v) for v in nu])
    if q is not None and q % q0:
        raise ValueError(f"nu does not have denominator dividing {q}")
    q = q0 if q is None else q
    return [tuple(frac(t * as_rational(v)) for v in nu) for t in range(1, q)]


def iterates_csv(points: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = len(points[0]) if points else 0
    w.writerow(["t"] + [f"x{i + 1}" for i in range(d)] + [f"x{i + 1}_dec" for i in range(d)])
    for t, pt in enumerate(points, start=1):
        w.writerow([t] + [fmt(v) for v in pt] + [to_decimal(v) for v in pt])
    return buf.getvalue()


# -- random primitive vectors and the covering-radius tail ----------------------

def primitive_set(d: int, T) -> list[tuple]:
    """Enumerate ``{(p_1..p_d, q): 0 < p_i < q <= T, gcd = 1}`` (small cases only)."""
    import itertools
    Tf = math.floor(as_rational(T))
    out = []
    for q in range(2, Tf + 1):
        for p in itertools.product(range(1, q), repeat=d):
            if math.gcd(q, *p) == 1:
                out.append(tuple(p) + (q,))
    return out


class PrimitiveSampler:
    """Uniform draws from the primitive vectors with ``max p_i < q <= T``.

    Rejection from the box ``[1, T-1]^d x [2, T]``: accept when every
    ``p_i < q`` and the gcd is one. Every element of the target set has the
    same probability in the box, so accepted draws are uniform.
    """

    def __init__(self, d: int, T, seed: int):
        self.d = d
        self.T = math.floor(as_rational(T))
        if self.T < 2 and d >= 1:
            raise EmptySetError("no primitive vectors with q <= T when T < 2")
        self.rng = make_rng(seed, _TAG_PRIMITIVE, d, self.T)

    def draw(self) -> tuple:
        while True:
            block = self.rng.integers(1, self.T, size=(256, self.d))
            qs = self.rng.integers(2, self.T + 1, size=256)
            for p, q in zip(block, qs):
                q = int(q)
                if int(p.max()) < q and math.gcd(q, *map(int, p)) == 1:
                    return tuple(int(v) for v in p) + (q,)

    def __iter__(self):
        while True:
            yield self.draw()


def sample_primitive(d: int, T, seed: int, count: int = 1) -> list[tuple]:
    s = PrimitiveSampler(d, T, seed)
    return [s.draw() for _ in range(count)]


@dataclass
class TailEstimate:
    d: int
    T: int
    samples: int
    R_grid: tuple
    above: tuple  # certified tau q^{1/d} > R
    ambiguous: tuple  # bracket straddles R
    p_hat: tuple
    slope: float | None
    slope_stderr: float | None
    fit_points: int
    min_count: int
    zero_threshold: float
    stat_max: Fraction  # largest certified upper end of the statistic
    stats: list = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["R", "R_dec", "above", "ambiguous", "p_hat", "p_hat_dec", "in_fit"])
        for R, a, amb, ph in zip(self.R_grid, self.above, self.ambiguous, self.p_hat):
            w.writerow([fmt(R), to_decimal(R), a, amb, fmt(ph), to_decimal(ph),
                        str(a >= self.min_count and a > 0).lower()])
        return buf.getvalue()

    def report(self) -> str:
        lines = [f"d={self.d} T={self.T} samples={self.samples}"]
        if self.slope is None:
            lines.append("slope: n/a (fewer than two usable grid points)")
        else:
            lines.append(f"slope: {self.slope:.6f} +/- {self.slope_stderr:.6f} ({self.fit_points} points)")
        lines.append(f"zero-tail threshold: {self.zero_threshold:.6f}")
        lines.append(f"max statistic (upper): {float(self.stat_max):.6f}")
        return "\n".join(lines)


def default_R_grid(d: int, T) -> tuple:
    """Geometric grid from 1 up to the zero-tail threshold, plus one point past it."""
    thr = math.sqrt(d) / 2 * float(T) ** (1 / d)
    pts = np.geomspace(1.0, thr, 16)
    grid = [Fraction(round(x * 1000), 1000) for x in pts]
    grid.append(Fraction(math.ceil(thr * 1000) + 1, 1000))
    return tuple(sorted(set(grid)))


def fit_loglog(R: Sequence[float], p: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of ``log p`` against ``log R`` and its standard error."""
    x = np.log(np.asarray(R, dtype=float))
    y = np.log(np.asarray(p, dtype=float))
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = ((x - xm) * (y - ym)).sum() / sxx
    if n <= 2:
        return float(slope), 0.0
    resid = y - (ym + slope * (x - xm))
    se = math.sqrt((resid**2).sum() / (n - 2) / sxx)
    return float(slope), float(se)


def tail_statistic(a: tuple, tol, bits: int = 64) -> Interval:
    """Certified bracket of ``tau(L_a) * q^{1/d}``."""
    p, q = a[:-1], a[-1]
    d = len(p)
    tau = covering_radius_bounds(basis_from_pq(p, q), tol, bits=bits)
    root = root_bounds(q, d, bits)
    return Interval(tau.lower * root[0], tau.upper * root[1])


def mc_theorem1(d: int, T, n_samples: int, R_grid: Sequence | None = None, tol=Fraction(1, 1000),
                seed: int = 0, min_count: int = 50, workers: int | None = None) -> TailEstimate:
    if d not in (2, 3):
        raise CapabilityError("Monte-Carlo study supports d in {2, 3}")
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples for a tail estimate")
    T = math.floor(as_rational(T))
    grid = tuple(sorted(as_rational(r) for r in (R_grid or default_R_grid(d, T))))
    sampler = PrimitiveSampler(d, T, seed)
    samples = [sampler.draw() for _ in range(n_samples)]
    workers = thread_count() if workers is None else workers
    tol = as_rational(tol)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            stats = list(ex.map(tail_statistic, samples, [tol] * len(samples)))
    else:
        stats = [tail_statistic(a, tol) for a in samples]
    above = tuple(sum(1 for s in stats if s.lo > R) for R in grid)
    ambiguous = tuple(sum(1 for s in stats if s.lo <= R < s.hi) for R in grid)
    p_hat = tuple(Fraction(a, n_samples) for a in above)
    use = [(float(R), float(ph)) for R, a, ph in zip(grid, above, p_hat) if a >= min_count and a > 0]
    slope = se = None
    if len(use) >= 2:
        slope, se = fit_loglog([u[0] for u in use], [u[1] for u in use])
    thr = math.sqrt(d) / 2 * T ** (1 / d)
    return TailEstimate(d, T, n_samples, grid, above, ambiguous, p_hat, slope, se, len(use),
                        min_count, thr, max(s.hi for s in stats), stats)
