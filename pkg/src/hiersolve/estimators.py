"""Estimator-style wrappers around the solvers.

Thin adapters for pipelines that expect the fit/get_params protocol:
construction stores hyperparameters verbatim, `fit(spec)` runs conflict
resolution plus solving and exposes the results as trailing-underscore
attributes. Validation happens at fit time, as the protocol requires.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .kaczmarz import SolverConfig, solve as kaczmarz_solve
from .model import max_violation
from .oracle import least_squares_dense
from .relaxation import DEFAULT_OMEGA, relax_solve
from .resolution import characteristic_integer, resolve
from .validation import as_specification


class _ResolverEstimator(BaseEstimator):
    """Shared fit logic; subclasses choose the iterative backend."""

    _backend = None

    def _config(self) -> SolverConfig:
        return SolverConfig(
            omega=self.omega,
            tolerance=self.tolerance,
            max_sweeps=self.max_sweeps,
            stall_window=self.stall_window,
            stall_factor=self.stall_factor,
            selection=self.selection,
            seed=self.seed,
        )

    def fit(self, spec, y=None):
        spec = as_specification(spec)
        cfg = self._config()
        result = resolve(spec, cfg, backend=type(self)._backend)
        self.n_constraints_ = len(spec.constraints)
        self.solution_ = result.solution
        self.enabled_ = result.enabled
        self.iota_ = result.iota
        self.attempts_ = result.attempts
        self.final_error_ = max_violation(spec, result.enabled, result.solution)
        self.converged_ = self.final_error_ <= cfg.tolerance
        return self


class KaczmarzSolver(_ResolverEstimator):
    """Row-projection solver with greedy conflict resolution."""

    _backend = staticmethod(kaczmarz_solve)

    def __init__(self, omega=1.0, tolerance=0.01, max_sweeps=1000,
                 stall_window=10, stall_factor=0.999, selection="cyclic",
                 seed=0):
        self.omega = omega
        self.tolerance = tolerance
        self.max_sweeps = max_sweeps
        self.stall_window = stall_window
        self.stall_factor = stall_factor
        self.selection = selection
        self.seed = seed


class RelaxationSolver(_ResolverEstimator):
    """Pivot-variable relaxation solver with greedy conflict resolution."""

    _backend = staticmethod(relax_solve)

    def __init__(self, omega=DEFAULT_OMEGA, tolerance=0.01, max_sweeps=1000,
                 stall_window=10, stall_factor=0.999, selection="cyclic",
                 seed=0):
        self.omega = omega
        self.tolerance = tolerance
        self.max_sweeps = max_sweeps
        self.stall_window = stall_window
        self.stall_factor = stall_factor
        self.selection = selection
        self.seed = seed


class LeastSquaresSolver(BaseEstimator):
    """Direct dense least squares over all equality rows; no resolution."""

    def __init__(self, tolerance=0.01):
        self.tolerance = tolerance

    def fit(self, spec, y=None):
        spec = as_specification(spec)
        rows = range(len(spec.constraints))
        self.n_constraints_ = len(spec.constraints)
        self.solution_ = least_squares_dense(spec, rows)
        self.enabled_ = frozenset(rows)
        self.iota_ = characteristic_integer(spec, self.enabled_)
        self.attempts_ = ()
        self.final_error_ = max_violation(spec, rows, self.solution_)
        self.converged_ = self.final_error_ <= self.tolerance
        return self
