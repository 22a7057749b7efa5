"""Exact reference procedures: dense least squares, feasibility, subset search.

These are the trusted-by-construction counterparts of the iterative solvers:
a from-scratch Householder factorization (no library solve routines), an
eps-feasibility decision built on it, and a brute-force search for the best
feasible constraint subset. Meant for desk-scale instances and tests; only
the least-squares solve is fast enough to double as the benchmark's direct
method.
"""

from __future__ import annotations

import numpy as np

from .kaczmarz import Selection, SolveOutcome, SolverConfig, solve
from .model import (Relation, SpecError, Specification, enabled_row_array,
                    max_violation)
from .validation import zero_assignment

DEFAULT_EPS = 0.01

# alternating-projection fallback used when inequalities make the
# least-squares point inconclusive; generous for desk-scale systems
_POCS_CONFIG = dict(omega=1.0, max_sweeps=3000, stall_window=100,
                    stall_factor=0.9999, selection=Selection.CYCLIC, seed=0)


def lstsq(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution via Householder QR.

    Column pivoting decides the numerical rank; rank-deficient systems get
    the minimum-norm minimizer through a second factorization of the
    leading rows (complete orthogonal decomposition).
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    m, n = A.shape
    if b.size != m:
        raise ValueError(f"shape mismatch: {A.shape} vs {b.size}")
    if m == 0 or n == 0:
        return np.zeros(n, dtype=np.float64)
    R = A.copy()
    qtb = b.copy()
    perm = np.arange(n)
    limit = min(m, n)
    diag = np.zeros(limit, dtype=np.float64)
    for j in range(limit):
        sq = np.einsum("ij,ij->j", R[j:, j:], R[j:, j:])
        p = int(np.argmax(sq))
        sigma = float(np.sqrt(sq[p]))
        if sigma == 0.0:
            break
        if p != 0:
            R[:, [j, j + p]] = R[:, [j + p, j]]
            perm[[j, j + p]] = perm[[j + p, j]]
        v = R[j:, j].copy()
        v[0] += np.copysign(sigma, v[0])
        vsq = float(v @ v)
        w = (2.0 / vsq) * (v @ R[j:, j:])
        R[j:, j:] -= np.outer(v, w)
        qtb[j:] -= ((2.0 / vsq) * float(v @ qtb[j:])) * v
        R[j + 1:, j] = 0.0
        diag[j] = abs(R[j, j])
    threshold = max(m, n) * np.finfo(np.float64).eps * (diag[0] if limit else 0.0)
    rank = 0
    while rank < limit and diag[rank] > threshold:
        rank += 1
    if rank == 0:
        return np.zeros(n, dtype=np.float64)

    if rank == n:
        xp = np.zeros(n, dtype=np.float64)
        for j in range(n - 1, -1, -1):
            xp[j] = (qtb[j] - R[j, j + 1:] @ xp[j + 1:]) / R[j, j]
    else:
        xp = _min_norm_underdetermined(R[:rank, :], qtb[:rank])
    x = np.zeros(n, dtype=np.float64)
    x[perm] = xp
    return x


def _min_norm_underdetermined(R1: np.ndarray, c: np.ndarray) -> np.ndarray:
    # factor R1^T = Q T (Householder, no pivoting; R1 has full row rank),
    # then R1 = T^T Q^T: forward-substitute T^T z = c and return Q [z; 0]
    B = R1.T.copy()
    n, r = B.shape
    vs = []
    for j in range(r):
        col = B[j:, j]
        sigma = float(np.linalg.norm(col))
        v = col.copy()
        v[0] += np.copysign(sigma, v[0])
        vsq = float(v @ v)
        w = (2.0 / vsq) * (v @ B[j:, j:])
        B[j:, j:] -= np.outer(v, w)
        B[j + 1:, j] = 0.0
        vs.append((v, vsq))
    T = B[:r, :r]
    z = np.zeros(r, dtype=np.float64)
    for j in range(r):
        z[j] = (c[j] - T[:j, j] @ z[:j]) / T[j, j]
    y = np.zeros(n, dtype=np.float64)
    y[:r] = z
    for j in range(r - 1, -1, -1):
        v, vsq = vs[j]
        y[j:] -= ((2.0 / vsq) * float(v @ y[j:])) * v
    return y


def dense_system(s: Specification, rows) -> tuple[np.ndarray, np.ndarray]:
    """Materialize the listed rows as a dense (A, b)."""
    rows = enabled_row_array(s, rows)
    A = np.zeros((rows.size, s.num_vars), dtype=np.float64)
    b = np.zeros(rows.size, dtype=np.float64)
    for k, cid in enumerate(rows):
        c = s.constraints[int(cid)]
        for i, a in c.terms:
            A[k, i] = a
        b[k] = c.rhs
    return A, b


def least_squares_dense(s: Specification, enabled) -> np.ndarray:
    """Minimum-norm minimizer of the enabled equality rows (dense path)."""
    rows = enabled_row_array(s, enabled)
    for cid in rows:
        if s.constraints[int(cid)].relation is not Relation.EQ:
            raise SpecError(f"constraint {int(cid)} is not an equality")
    if rows.size == 0:
        return zero_assignment(s.num_vars)
    A, b = dense_system(s, rows)
    return lstsq(A, b)


def feasibility_witness(s: Specification, enabled, eps: float = DEFAULT_EPS):
    """(feasible, witness): can some point satisfy all enabled rows within eps?

    Equalities are solved by least squares; if inequalities are present and
    unhappy at that point, alternating projections take over, and the final
    answer is certified by re-checking the witness. Pure-equality subsets are
    judged by the least-squares residual alone (the 2-norm minimizer; exact
    for consistent systems, desk-scale approximate for near-ties).
    """
    rows = enabled_row_array(s, enabled)
    if rows.size == 0:
        return True, zero_assignment(s.num_vars)
    eq = [int(cid) for cid in rows if s.constraints[int(cid)].relation is Relation.EQ]
    x = least_squares_dense(s, eq) if eq else zero_assignment(s.num_vars)
    if max_violation(s, rows, x) <= eps:
        return True, x
    if len(eq) == rows.size:
        return False, x
    outcome = solve(s, rows, x, SolverConfig(tolerance=eps, **_POCS_CONFIG))
    return outcome.converged, outcome.x


def feasible_exact(s: Specification, enabled, eps: float = DEFAULT_EPS) -> bool:
    return feasibility_witness(s, enabled, eps)[0]


def exact_backend(s: Specification, enabled, x0, cfg: SolverConfig) -> SolveOutcome:
    """Feasibility-oracle backend for the conflict resolver.

    The warm start is accepted for interface parity but unused; the witness
    search has its own starting points.
    """
    feasible, witness = feasibility_witness(s, enabled, cfg.tolerance)
    return SolveOutcome(witness, feasible, 0, max_violation(s, enabled, witness))


def max_feasible_iota(s: Specification, eps: float = DEFAULT_EPS):
    """Brute-force (characteristic integer, subset) maximum over all feasible
    subsets. Enumeration is capped at 20 constraints.

    Subsets are visited in descending characteristic-integer order, skipping
    supersets of known-infeasible pairs (feasibility is downward closed), so
    the first feasible hit is the answer.
    """
    m = len(s.constraints)
    if m > 20:
        raise SpecError(f"subset enumeration is capped at 20 constraints, got {m}")
    order = s.priority_order
    bad_pairs = []
    for p in range(m):
        for q in range(p + 1, m):
            if not feasible_exact(s, (order[p], order[q]), eps):
                bad_pairs.append((1 << (m - 1 - p)) | (1 << (m - 1 - q)))
    for v in range((1 << m) - 1, -1, -1):
        if any(v & pm == pm for pm in bad_pairs):
            continue
        subset = frozenset(order[p] for p in range(m) if (v >> (m - 1 - p)) & 1)
        if feasible_exact(s, subset, eps):
            return v, subset
    raise AssertionError("unreachable: the empty subset is always feasible")
