"""Shared builders: terse constraint rows and seeded random systems."""

import numpy as np

from hiersolve import Constraint, Relation, Specification

_REL = {"eq": Relation.EQ, "le": Relation.LE, "ge": Relation.GE}


def row(priority, op, rhs, *terms):
    """row(0, "eq", 5, (0, 1.0)) -> the constraint 1*x0 = 5 at rank 0."""
    return Constraint(tuple(terms), _REL[op], float(rhs), priority)


def spec_of(num_vars, *rows_):
    return Specification(num_vars, tuple(rows_))


def random_spec(rng, num_vars=(1, 3), num_rows=(4, 12), conflict_rate=0.5):
    """Desk-scale random specification on an integer-friendly grid.

    Coefficients come from {-2, -1, 1, 2} and right-hand sides from the
    half-integer grid, so subset feasibility never lands near the 0.01
    epsilon the oracle answers at. With probability conflict_rate two rows
    are overwritten by a direct contradiction.
    """
    n = int(rng.integers(num_vars[0], num_vars[1] + 1))
    m = int(rng.integers(num_rows[0], num_rows[1] + 1))
    rows = []
    for p in range(m):
        nnz = int(rng.integers(1, min(n, 2) + 1))
        idx = np.sort(rng.choice(n, size=nnz, replace=False))
        coefs = rng.choice((-2.0, -1.0, 1.0, 2.0), size=nnz)
        terms = tuple((int(i), float(a)) for i, a in zip(idx, coefs))
        op = ("eq", "le", "ge")[int(rng.integers(3))]
        rows.append(row(p, op, float(rng.integers(-4, 5)) / 2.0, *terms))
    if m >= 2 and rng.random() < conflict_rate:
        i = int(rng.integers(n))
        a, b = np.sort(rng.choice(m, size=2, replace=False))
        rows[int(a)] = row(int(a), "eq", 0.0, (i, 1.0))
        rows[int(b)] = row(int(b), "eq", 1.0, (i, 1.0))
    return Specification(n, tuple(rows))


def planted_system(rng, max_vars=50, max_rows=60):
    """(spec, xbar) with every row satisfied at the planted point xbar.

    Equalities hold exactly at xbar; inequalities get non-negative slack.
    """
    n = int(rng.integers(2, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    xbar = rng.normal(0.0, 2.0, size=n)
    rows = []
    for p in range(m):
        nnz = int(rng.integers(1, min(n, 4) + 1))
        idx = np.sort(rng.choice(n, size=nnz, replace=False))
        coefs = rng.uniform(0.2, 3.0, size=nnz) * rng.choice((-1.0, 1.0), size=nnz)
        terms = tuple((int(i), float(a)) for i, a in zip(idx, coefs))
        at_xbar = float(sum(a * xbar[i] for i, a in terms))
        kind = int(rng.integers(3))
        slack = float(rng.uniform(0.0, 1.0))
        if kind == 0:
            rows.append(row(p, "eq", at_xbar, *terms))
        elif kind == 1:
            rows.append(row(p, "le", at_xbar + slack, *terms))
        else:
            rows.append(row(p, "ge", at_xbar - slack, *terms))
    return Specification(n, tuple(rows)), xbar
