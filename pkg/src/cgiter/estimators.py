"""scikit-learn style wrappers over the exact pipelines.

The data here is a single object (an ILP instance or a multiplier), not a
sample matrix, so only the parameter handling and the fit / transform
protocol are borrowed; there is no ``predict`` and no batch semantics.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cuts import cuts_from_solution
from .experiments import mc_theorem1
from .lattice import basis_from_pq, covering_radius_bounds, lll_reduce
from .lp import OPTIMAL, solve_lp
from .strategies import ENUM_GUARD, run_strategy
from .validation import InputError, check_instance, check_nu, check_strategy


class IteratedCutGenerator(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Fit on an instance (LP solve + base CG-cuts); transform to iterated cuts.

    ``transform`` returns one :class:`StrategyResult` per fractional basic
    variable, each carrying its cut ``pi x <= pi0``.
    """

    def __init__(self, strategy=4, eps=None, delta=None, guard: int = ENUM_GUARD):
        self.strategy = strategy
        self.eps = eps
        self.delta = delta
        self.guard = guard

    def fit(self, X, y=None):
        inst = check_instance(X)
        sol = solve_lp(inst)
        if sol.status != OPTIMAL:
            raise InputError(f"LP relaxation is {sol.status}")
        self.instance_ = inst
        self.lp_solution_ = sol
        self.base_cuts_ = cuts_from_solution(sol, inst)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "base_cuts_")
        if X is not None and check_instance(X) != self.instance_:
            raise InputError("transform expects the instance the generator was fitted on")
        s = check_strategy(self.strategy)
        return [run_strategy(s, cg, eps=self.eps, delta=self.delta, guard=self.guard)
                for cg in self.base_cuts_]


class CoveringRadiusEstimator(BaseEstimator):
    """Certified covering radius of ``L_nu``; ``tau_`` holds the bracket."""

    def __init__(self, tol="1/1000", bits: int = 64):
        self.tol = tol
        self.bits = bits

    def fit(self, X, y=None):
        p, q = check_nu(X)
        self.p_, self.q_ = p, q
        self.basis_ = basis_from_pq(p, q)
        self.reduced_basis_ = lll_reduce(self.basis_)
        self.tau_ = covering_radius_bounds(self.basis_, self.tol, bits=self.bits)
        return self


class TailSlopeEstimator(BaseEstimator):
    """Monte-Carlo tail of ``tau(L_a) q^{1/d}``; ``fit`` takes no data."""

    def __init__(self, d: int = 2, T: int = 200, n_samples: int = 2000, R_grid=None,
                 tol="1/1000", seed: int = 0, min_count: int = 50):
        self.d = d
        self.T = T
        self.n_samples = n_samples
        self.R_grid = R_grid
        self.tol = tol
        self.seed = seed
        self.min_count = min_count

    def fit(self, X=None, y=None):
        est = mc_theorem1(self.d, self.T, self.n_samples, self.R_grid, self.tol, self.seed,
                          min_count=self.min_count)
        self.tail_ = est
        self.slope_ = est.slope
        self.slope_stderr_ = est.slope_stderr
        return self
