"""Compiled inner loops shared by the solvers.

The row storage is CSR-like: indptr/indices/coefs hold the nonzero pattern,
rhs/rel/sqnorm/normdiv are per-row. Relation codes match model.Relation.

Term sums run left to right in ascending index order, exactly like the
pure-Python reference ops in model/kaczmarz; tests assert bitwise agreement,
so do not reorder the arithmetic here.
"""

import numpy as np
from numba import njit

REL_EQ = 0
REL_LE = 1
REL_GE = 2

# status codes returned by the fused solve loops
STATUS_RUNNING = 0
STATUS_CONVERGED = 1
STATUS_STALLED = 2


@njit(cache=True)
def apply_projections(indptr, indices, coefs, rhs, rel, sqnorm, order, x, omega):
    """Project x onto each row listed in `order`, in place.

    Satisfied inequality rows are skipped (left untouched bitwise).
    """
    for t in range(order.size):
        r = order[t]
        s = 0.0
        for j in range(indptr[r], indptr[r + 1]):
            s += coefs[j] * x[indices[j]]
        resid = rhs[r] - s
        code = rel[r]
        if code == REL_LE and resid >= 0.0:
            continue
        if code == REL_GE and resid <= 0.0:
            continue
        step = omega * resid / sqnorm[r]
        for j in range(indptr[r], indptr[r + 1]):
            x[indices[j]] += step * coefs[j]


@njit(cache=True)
def apply_pivot_steps(indptr, indices, coefs, rhs, rel, pivot_var, pivot_coef,
                      order, x, omega):
    """Coordinate-relaxation step for each row in `order`: only the pivot
    variable of the row moves."""
    for t in range(order.size):
        r = order[t]
        s = 0.0
        for j in range(indptr[r], indptr[r + 1]):
            s += coefs[j] * x[indices[j]]
        resid = rhs[r] - s
        code = rel[r]
        if code == REL_LE and resid >= 0.0:
            continue
        if code == REL_GE and resid <= 0.0:
            continue
        x[pivot_var[r]] += omega * resid / pivot_coef[r]


@njit(cache=True)
def max_scaled_violation(indptr, indices, coefs, rhs, rel, normdiv, rows, x):
    """max over rows of violation / max(1, row norm); 0.0 for no rows."""
    worst = 0.0
    for t in range(rows.size):
        r = rows[t]
        s = 0.0
        for j in range(indptr[r], indptr[r + 1]):
            s += coefs[j] * x[indices[j]]
        resid = rhs[r] - s
        code = rel[r]
        if code == REL_EQ:
            v = abs(resid)
        elif code == REL_LE:
            v = -resid if resid < 0.0 else 0.0
        else:
            v = resid if resid > 0.0 else 0.0
        v = v / normdiv[r]
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def solve_cyclic(indptr, indices, coefs, rhs, rel, sqnorm, normdiv, rows, x,
                 omega, tol, max_sweeps, stall_window, stall_factor, err0,
                 errhist):
    """Fused cyclic solve loop. Entry error err0 (> tol) was computed by the
    caller and sits in errhist[0]. Returns (status, sweeps_used, final_error).

    Mirrors the per-sweep Python loop in kaczmarz.solve exactly: one error
    check per sweep, sliding stall window anchored at errhist[k - window].
    """
    err = err0
    for k in range(1, max_sweeps + 1):
        apply_projections(indptr, indices, coefs, rhs, rel, sqnorm, rows, x,
                          omega)
        err = max_scaled_violation(indptr, indices, coefs, rhs, rel, normdiv,
                                   rows, x)
        errhist[k] = err
        if err <= tol:
            return STATUS_CONVERGED, k, err
        if not np.isfinite(err):
            return STATUS_STALLED, k, err
        if k >= stall_window and err >= stall_factor * errhist[k - stall_window]:
            return STATUS_STALLED, k, err
    return STATUS_STALLED, max_sweeps, err


@njit(cache=True)
def solve_cyclic_relax(indptr, indices, coefs, rhs, rel, pivot_var, pivot_coef,
                       normdiv, visit, check, x, omega, tol, max_sweeps,
                       stall_window, stall_factor, err0, errhist):
    """Fused cyclic relaxation loop. `visit` holds the pivot-matched rows that
    get updated; `check` holds every enabled row (unmatched rows still count
    toward the error)."""
    err = err0
    for k in range(1, max_sweeps + 1):
        apply_pivot_steps(indptr, indices, coefs, rhs, rel, pivot_var,
                          pivot_coef, visit, x, omega)
        err = max_scaled_violation(indptr, indices, coefs, rhs, rel, normdiv,
                                   check, x)
        errhist[k] = err
        if err <= tol:
            return STATUS_CONVERGED, k, err
        if not np.isfinite(err):
            return STATUS_STALLED, k, err
        if k >= stall_window and err >= stall_factor * errhist[k - stall_window]:
            return STATUS_STALLED, k, err
    return STATUS_STALLED, max_sweeps, err
