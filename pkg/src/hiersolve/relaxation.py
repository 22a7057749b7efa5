"""Coordinate-wise linear relaxation baseline.

Each enabled row gets a pivot variable (seeded randomized greedy matching,
injective); a step moves only that pivot: x_p += omega * residual / a_p.
Rows left without a pivot are skipped during sweeps but still count toward
the error, so a system needing them cannot converge and is rejected by the
conflict resolver. Convergence, stall and budget rules are shared with the
Kaczmarz solver so timing comparisons differ only in the update rule and the
pivot-assignment cost. Use omega around DEFAULT_OMEGA (0.7); full steps tend
to diverge on the layout systems this is benchmarked on.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .kaczmarz import Selection, SolveOutcome, SolverConfig
from .model import SpecError, Specification, enabled_row_array, max_violation
from .validation import as_assignment, zero_assignment

DEFAULT_OMEGA = 0.7


def assign_pivots_random(s: Specification, enabled, seed: int = 0) -> dict[int, int]:
    """Injective constraint -> pivot variable map by randomized greedy matching.

    Greedy in the usual fewest-candidates-first order (rows with fewer
    nonzeros match before wider ones, seeded shuffle breaking ties); each row
    takes a random still-free variable among its nonzeros, or stays
    unmatched. Fixed seed, fixed result.
    """
    rows = enabled_row_array(s, enabled)
    if rows.size == 0:
        raise SpecError("pivot assignment needs a non-empty enabled set")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(rows.size)
    degree = np.diff(s.rows.indptr)[rows]
    pivots: dict[int, int] = {}
    used: set[int] = set()
    for t in np.lexsort((perm, degree)):
        cid = int(rows[t])
        free = [i for i, _ in s.constraints[cid].terms if i not in used]
        if free:
            choice = free[rng.integers(0, len(free))]
            pivots[cid] = int(choice)
            used.add(choice)
    return pivots


def relax_solve(s: Specification, enabled, x0=None,
                cfg: SolverConfig = SolverConfig(omega=DEFAULT_OMEGA)) -> SolveOutcome:
    """Relaxation counterpart of kaczmarz.solve; same exit rules.

    The pivot assignment is recomputed from cfg.seed on every call (the
    enabled set may have changed, and the recomputation cost is part of what
    the benchmark measures).
    """
    rows = enabled_row_array(s, enabled)
    x = zero_assignment(s.num_vars) if x0 is None else as_assignment(x0, s.num_vars)
    err = max_violation(s, rows, x)
    if err <= cfg.tolerance or rows.size == 0:
        return SolveOutcome(x, True, 0, err)

    pivots = assign_pivots_random(s, rows, cfg.seed)
    mask = np.fromiter((int(cid) in pivots for cid in rows), dtype=bool,
                       count=rows.size)
    visit = rows[mask]
    r = s.rows
    m = len(s.constraints)
    pivot_var = np.zeros(m, dtype=np.int64)
    pivot_coef = np.ones(m, dtype=np.float64)
    for cid, var in pivots.items():
        pivot_var[cid] = var
        for i, a in s.constraints[cid].terms:
            if i == var:
                pivot_coef[cid] = a
                break
    errhist = np.empty(cfg.max_sweeps + 1, dtype=np.float64)
    errhist[0] = err
    if visit.size == 0:
        # nothing movable; the entry check above already failed
        return SolveOutcome(x, False, 0, err)

    if cfg.selection is Selection.CYCLIC:
        status, sweeps, err = _kernels.solve_cyclic_relax(
            r.indptr, r.indices, r.coefs, r.rhs, r.rel, pivot_var, pivot_coef,
            r.normdiv, visit, rows, x, cfg.omega, cfg.tolerance,
            cfg.max_sweeps, cfg.stall_window, cfg.stall_factor, err, errhist)
        return SolveOutcome(x, status == _kernels.STATUS_CONVERGED, int(sweeps),
                            float(err))

    rng = np.random.default_rng(cfg.seed)
    weights = r.sqnorm[visit]
    for k in range(1, cfg.max_sweeps + 1):
        if cfg.selection is Selection.UNIFORM_RANDOM:
            order = visit[rng.integers(0, visit.size, size=visit.size)]
        else:
            order = rng.choice(visit, size=visit.size, replace=True,
                               p=weights / weights.sum())
        _kernels.apply_pivot_steps(r.indptr, r.indices, r.coefs, r.rhs, r.rel,
                                   pivot_var, pivot_coef, order, x, cfg.omega)
        err = max_violation(s, rows, x)
        errhist[k] = err
        if err <= cfg.tolerance:
            return SolveOutcome(x, True, k, err)
        if not np.isfinite(err):
            return SolveOutcome(x, False, k, err)
        if k >= cfg.stall_window and err >= cfg.stall_factor * errhist[k - cfg.stall_window]:
            return SolveOutcome(x, False, k, err)
    return SolveOutcome(x, False, cfg.max_sweeps, err)
