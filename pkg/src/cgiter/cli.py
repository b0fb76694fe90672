"""``cg-iterate`` command line: solve, cuts, lattice, table1, mc, iterates.

Exit codes: 0 success (including benign notices), 2 bad input, 3 a
dimension or enumeration guard refused the request.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import replace
from fractions import Fraction

from .arith import fmt, fmt_vec, to_decimal
from .cuts import cuts_from_solution
from .experiments import (ExperimentConfig, EmptySetError, NoGapError, emit_iterates, gap_closed,
                          iterates_csv, mc_theorem1, run_table1)
from .lattice import (CapabilityError, PreconditionError, babai_nearest_plane, basis_from_pq,
                      covering_radius_bounds, dual_basis, lll_reduce, shortest_vector)
from .lp import OPTIMAL, solve_ilp, solve_lp
from .strategies import ENUM_GUARD, EnumerationGuardError, run_strategy
from .validation import InputError, check_strategy, load_instance, parse_nu, parse_rational, parse_vector

EXIT_OK, EXIT_INPUT, EXIT_CAPABILITY = 0, 2, 3
ALL_STRATEGIES = (0, 1, 2, 3, 4, 5, "approx-mult", "approx-add")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _basis_lines(name: str, L) -> list[str]:
    return [f"{name}[{i}]: {fmt_vec(v)}" for i, v in enumerate(L.vectors)]


# -- subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    sol = solve_lp(inst)
    out = [f"status: {sol.status}"]
    if sol.status == OPTIMAL:
        out += [f"lp_objective: {fmt(sol.objective)}",
                f"x_star: {fmt_vec(sol.x_star)}",
                f"basis: {' '.join(str(k) for k in sol.basis)}",
                f"basis_det: {sol.basis_det}"]
        if args.ilp:
            z, x = solve_ilp(inst)
            out += [f"ilp_objective: {fmt(z)}", f"x_int: {' '.join(map(str, x))}"]
    _emit("\n".join(out) + "\n", None)
    return EXIT_OK


def cmd_cuts(args) -> int:
    inst = load_instance(args.instance)
    sol = solve_lp(inst)
    if sol.status != OPTIMAL:
        print(f"status: {sol.status}; no tableau to cut from")
        return EXIT_OK
    cgs = cuts_from_solution(sol, inst)
    if not cgs:
        print("no fractional variables: the LP optimum is integral")
        return EXIT_OK
    strategies = ALL_STRATEGIES[:6] if args.strategy == "all" else (check_strategy(args.strategy),)
    eps = parse_rational(args.eps, "--eps") if args.eps else None
    delta = parse_rational(args.delta, "--delta") if args.delta else None
    z_lp = sol.objective
    z_ilp = solve_ilp(inst)[0] if args.gap else None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["basic_var", "q", "strategy", "t", "xi", "rounding", "rounding_dec", "r_sq", "r_sq_dec",
                "n_sq", "n_sq_dec", "pi", "pi0", "approx", "gap_closed", "gap_closed_dec"])
    for cg in cgs:
        for s in strategies:
            res = run_strategy(s, cg, eps=eps, delta=delta, guard=args.guard)
            pi, pi0 = (res.cut.pi, res.cut.pi0) if res.cut is not None else ((), "")
            gap = ""
            if z_ilp is not None and res.cut is not None:
                try:
                    gap = gap_closed(inst, pi, pi0, z_lp=z_lp, z_ilp=z_ilp)
                except NoGapError:
                    gap = ""
            r = res.r_ratio
            w.writerow([cg.source_row, cg.q, s, res.t, fmt_vec(res.xi), fmt(res.rounding), to_decimal(res.rounding),
                        fmt(r) if r is not None else "", to_decimal(r) if r is not None else "",
                        fmt(res.n_value), to_decimal(res.n_value), " ".join(map(str, pi)), pi0,
                        str(res.approx).lower(), fmt(gap) if gap != "" else "",
                        to_decimal(gap) if gap != "" else ""])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_lattice(args) -> int:
    p, q = parse_nu(args.nu)
    L = basis_from_pq(p, q)
    out = [f"nu: {fmt_vec([Fraction(v, q) for v in p])}", f"q: {q}", f"d: {L.d}"]
    act = args.action
    if act == "basis":
        out += _basis_lines("b", L) + [f"det: {fmt(L.det_abs)}"]
    elif act == "lll":
        out += _basis_lines("b", lll_reduce(L))
    elif act == "tau":
        tol = parse_rational(args.tol, "--tol")
        tau = covering_radius_bounds(L, tol)
        out += [f"tau_lower: {fmt(tau.lower)}", f"tau_upper: {fmt(tau.upper)}",
                f"tau_dec: [{to_decimal(tau.lower)}, {to_decimal(tau.upper)}]",
                f"deep_hole: {fmt_vec(tau.deep_hole)}"]
    elif act == "sv":
        v, n2 = shortest_vector(L)
        out += [f"shortest: {fmt_vec(v)}", f"lambda1_sq: {fmt(n2)}"]
    elif act == "dual":
        out += _basis_lines("b_dual", dual_basis(L))
    elif act == "babai":
        if not args.target:
            raise InputError("--action babai needs --target")
        c = parse_vector(args.target, L.d, "--target")
        out += [f"babai: {fmt_vec(babai_nearest_plane(lll_reduce(L), c))}"]
    _emit("\n".join(out) + "\n", None)
    return EXIT_OK


def cmd_table1(args) -> int:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.instances is not None:
        cfg = replace(cfg, instances_per_cell=args.instances)
    tab = run_table1(cfg)
    _emit(tab.to_csv(), args.output)
    if args.detail:
        _emit(tab.detail_csv(), args.detail)
    return EXIT_OK


def cmd_mc(args) -> int:
    grid = None
    if args.R_grid:
        grid = [parse_rational(r, "--R-grid") for r in args.R_grid.replace(",", " ").split()]
    T = parse_rational(args.T, "--T")
    if T < 2:
        raise EmptySetError("no primitive vectors with q <= T when T < 2")
    est = mc_theorem1(args.d, T, args.samples, grid, parse_rational(args.tol, "--tol"), args.seed,
                      min_count=args.min_count)
    _emit(est.to_csv(), args.output)
    print(est.report(), file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_iterates(args) -> int:
    p, q = parse_nu(args.nu)
    _emit(iterates_csv(emit_iterates([Fraction(v, q) for v in p])), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cg-iterate", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="exact LP (and ILP) optimum of an instance file")
    s.add_argument("instance")
    s.add_argument("--ilp", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("cuts", help="iterated CG cuts for each fractional basic variable")
    s.add_argument("instance")
    s.add_argument("--strategy", default="all",
                   choices=["0", "1", "2", "3", "4", "5", "approx-mult", "approx-add", "all"])
    s.add_argument("--eps")
    s.add_argument("--delta")
    s.add_argument("--guard", type=int, default=ENUM_GUARD)
    s.add_argument("--no-gap", dest="gap", action="store_false", help="skip the ILP solve and gap column")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_cuts)

    s = sub.add_parser("lattice", help="basis, reduction, covering radius and friends for L_nu")
    s.add_argument("nu", help='"p1/q p2/q ..." or JSON {"p": [...], "q": ...} or a file holding either')
    s.add_argument("--action", default="basis", choices=["basis", "lll", "tau", "sv", "dual", "babai"])
    s.add_argument("--target")
    s.add_argument("--tol", default="1/1000")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("table1", help="strategy comparison over random instances")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--instances", type=int, help="instances per (m, n) cell")
    s.add_argument("-o", "--output")
    s.add_argument("--detail", help="also write per-instance rows to this file")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("mc", help="tail of the scaled covering radius of random L_a")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--T", default="200")
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--R-grid", dest="R_grid")
    s.add_argument("--tol", default="1/1000")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--min-count", type=int, default=50)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("iterates", help="all points t*nu mod 1")
    s.add_argument("nu")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_iterates)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CapabilityError, EnumerationGuardError) as exc:
        print(f"capability: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (InputError, PreconditionError, EmptySetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
