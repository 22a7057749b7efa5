"""Kaczmarz row projection: single-row step, sweep, and full solve.

Each step projects the iterate orthogonally onto the solution hyperplane of
one row (x += omega * residual / ||a||^2 * a). Inequality rows are projected
only when violated, onto their boundary hyperplane; satisfied ones are left
untouched. A solve repeats sweeps over the enabled rows until the scaled
error (model.max_violation) drops to the tolerance, the sweep budget runs
out, or the error stops improving (stall detection, the infeasibility signal
used by the conflict resolver).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import (Constraint, Relation, SpecError, Specification,
                    enabled_row_array, max_violation)
from .validation import as_assignment, zero_assignment


class Selection(enum.Enum):
    """Row visit order within a sweep."""

    CYCLIC = "cyclic"
    UNIFORM_RANDOM = "uniform"
    NORM_WEIGHTED = "norm-weighted"


@dataclass(frozen=True)
class SolverConfig:
    omega: float = 1.0
    tolerance: float = 0.01
    max_sweeps: int = 1000
    stall_window: int = 10
    stall_factor: float = 0.999
    selection: Selection = Selection.CYCLIC
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.omega < 2.0:
            raise SpecError(
                f"omega must lie in the open interval (0, 2), got {self.omega}")
        if not self.tolerance > 0.0:
            raise SpecError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.max_sweeps) < 1:
            raise SpecError(f"max_sweeps must be at least 1, got {self.max_sweeps}")
        if int(self.stall_window) < 1:
            raise SpecError(f"stall_window must be at least 1, got {self.stall_window}")
        if not 0.0 < self.stall_factor < 1.0:
            raise SpecError(
                f"stall_factor must lie in (0, 1), got {self.stall_factor}")
        if not isinstance(self.selection, Selection):
            try:
                object.__setattr__(self, "selection", Selection(self.selection))
            except ValueError:
                raise SpecError(f"unknown selection {self.selection!r}") from None
        object.__setattr__(self, "max_sweeps", int(self.max_sweeps))
        object.__setattr__(self, "stall_window", int(self.stall_window))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True, eq=False)
class SolveOutcome:
    x: np.ndarray
    converged: bool
    sweeps_used: int
    final_error: float


def project_row(x: np.ndarray, c: Constraint, omega: float) -> np.ndarray:
    """One projection step, in place; returns x.

    Only the variables in c.terms are written. A satisfied inequality leaves
    x untouched (bitwise). Keep the arithmetic order in sync with
    _kernels.apply_projections.
    """
    if not 0.0 < omega < 2.0:
        raise SpecError(f"omega must lie in the open interval (0, 2), got {omega}")
    s = 0.0
    for i, a in c.terms:
        s += a * x[i]
    resid = c.rhs - s
    if c.relation is Relation.LE and resid >= 0.0:
        return x
    if c.relation is Relation.GE and resid <= 0.0:
        return x
    step = omega * resid / c.squared_norm
    for i, a in c.terms:
        x[i] += step * a
    return x


def _sweep_order(rows: np.ndarray, spec: Specification, selection: Selection,
                 rng: np.random.Generator) -> np.ndarray:
    if selection is Selection.CYCLIC:
        return rows
    if selection is Selection.UNIFORM_RANDOM:
        return rows[rng.integers(0, rows.size, size=rows.size)]
    weights = spec.rows.sqnorm[rows]
    return rng.choice(rows, size=rows.size, replace=True, p=weights / weights.sum())


def sweep(x: np.ndarray, s: Specification, enabled, cfg: SolverConfig,
          rng: np.random.Generator) -> np.ndarray:
    """|enabled| projection steps in the configured visit order, in place.

    CYCLIC visits the enabled rows in specification order; the random modes
    draw |enabled| rows with replacement (norm-weighted: probability
    proportional to the squared row norm).
    """
    rows = enabled if isinstance(enabled, np.ndarray) else enabled_row_array(s, enabled)
    if rows.size == 0:
        raise SpecError("sweep needs a non-empty enabled set")
    order = _sweep_order(rows, s, cfg.selection, rng)
    r = s.rows
    _kernels.apply_projections(r.indptr, r.indices, r.coefs, r.rhs, r.rel,
                               r.sqnorm, order, x, cfg.omega)
    return x


def solve(s: Specification, enabled, x0=None, cfg: SolverConfig = SolverConfig()) -> SolveOutcome:
    """Iterate sweeps until converged, stalled, or out of budget.

    The scaled error is checked once per sweep (and once at entry, so an
    already-satisfied set converges in 0 sweeps). Stall: at sweep k >=
    stall_window, the run is abandoned when err[k] >= stall_factor *
    err[k - stall_window]. Identical inputs (including cfg.seed) give a
    bitwise-identical outcome.
    """
    rows = enabled_row_array(s, enabled)
    x = zero_assignment(s.num_vars) if x0 is None else as_assignment(x0, s.num_vars)
    err = max_violation(s, rows, x)
    if err <= cfg.tolerance or rows.size == 0:
        return SolveOutcome(x, True, 0, err)

    r = s.rows
    errhist = np.empty(cfg.max_sweeps + 1, dtype=np.float64)
    errhist[0] = err
    if cfg.selection is Selection.CYCLIC:
        status, sweeps, err = _kernels.solve_cyclic(
            r.indptr, r.indices, r.coefs, r.rhs, r.rel, r.sqnorm, r.normdiv,
            rows, x, cfg.omega, cfg.tolerance, cfg.max_sweeps,
            cfg.stall_window, cfg.stall_factor, err, errhist)
        return SolveOutcome(x, status == _kernels.STATUS_CONVERGED, int(sweeps),
                            float(err))

    rng = np.random.default_rng(cfg.seed)
    for k in range(1, cfg.max_sweeps + 1):
        order = _sweep_order(rows, s, cfg.selection, rng)
        _kernels.apply_projections(r.indptr, r.indices, r.coefs, r.rhs, r.rel,
                                   r.sqnorm, order, x, cfg.omega)
        err = max_violation(s, rows, x)
        errhist[k] = err
        if err <= cfg.tolerance:
            return SolveOutcome(x, True, k, err)
        if not np.isfinite(err):
            return SolveOutcome(x, False, k, err)
        if k >= cfg.stall_window and err >= cfg.stall_factor * errhist[k - cfg.stall_window]:
            return SolveOutcome(x, False, k, err)
    return SolveOutcome(x, False, cfg.max_sweeps, err)
