"""Iterated Chvatal-Gomory cuts: exact LP, cut generation, lattice tools,
iterate-selection strategies and the experiment harness."""
from .arith import Interval, as_rational, fmt
from .cuts import CgCut, IteratedCut, cuts_from_solution, iterate_cut
from .estimators import CoveringRadiusEstimator, IteratedCutGenerator, TailSlopeEstimator
from .lattice import (LatticeBasis, babai_nearest_plane, basis_from_nu, basis_from_pq,
                      covering_radius_bounds, cvp_exact, lll_reduce, shortest_vector)
from .lp import IlpInstance, solve_ilp, solve_lp
from .strategies import approx_add, approx_mult, approx_point, geom_r, run_strategy

__version__ = "0.1.0"
