"""Sparse prioritized linear constraint systems.

A Specification is the pair (A, b) stored row-wise: each Constraint is one
sparse row with a relation (=, <=, >=), a right-hand side and a distinct
priority rank (0 = most important). Assignments are plain float64 numpy
arrays; rows never gain nonzeros, so storage is row-only by design.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class SpecError(ValueError):
    """A constraint or specification violates a structural rule."""


class Relation(enum.Enum):
    EQ = "eq"
    LE = "le"
    GE = "ge"

    @property
    def code(self) -> int:
        return _REL_CODE[self]


_REL_CODE = {
    Relation.EQ: _kernels.REL_EQ,
    Relation.LE: _kernels.REL_LE,
    Relation.GE: _kernels.REL_GE,
}


@dataclass(frozen=True)
class Constraint:
    """One sparse row: sum(coef * x[idx]) <rel> rhs, with a priority rank.

    terms must be sorted by variable index, strictly increasing, with no zero
    coefficients. squared_norm caches sum(coef**2).
    """

    terms: tuple[tuple[int, float], ...]
    relation: Relation
    rhs: float
    priority: int
    squared_norm: float = field(init=False, compare=False, default=0.0)

    def __post_init__(self):
        terms = tuple((int(i), float(a)) for i, a in self.terms)
        if not terms:
            raise SpecError("empty constraint row")
        last = -1
        for i, a in terms:
            if i < 0:
                raise SpecError(f"negative variable index {i}")
            if i <= last:
                raise SpecError(
                    f"term indices must be strictly increasing (index {i} repeats or goes backwards)")
            if a == 0.0:
                raise SpecError(f"zero coefficient on variable {i}")
            if not np.isfinite(a):
                raise SpecError(f"non-finite coefficient on variable {i}")
            last = i
        if not isinstance(self.relation, Relation):
            raise SpecError(f"bad relation {self.relation!r}")
        rhs = float(self.rhs)
        if not np.isfinite(rhs):
            raise SpecError("non-finite right-hand side")
        priority = int(self.priority)
        if priority < 0:
            raise SpecError(f"negative priority {priority}")
        sq = 0.0
        for _, a in terms:
            sq += a * a
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "priority", priority)
        object.__setattr__(self, "squared_norm", sq)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.terms)


@dataclass(frozen=True)
class Specification:
    """num_vars plus an ordered sequence of constraints (may be over-determined)."""

    num_vars: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        n = int(self.num_vars)
        if n <= 0:
            raise SpecError(f"num_vars must be positive, got {n}")
        cons = tuple(self.constraints)
        seen: dict[int, int] = {}
        for pos, c in enumerate(cons):
            if not isinstance(c, Constraint):
                raise SpecError(f"constraint {pos} is not a Constraint")
            for i, _ in c.terms:
                if i >= n:
                    raise SpecError(
                        f"constraint {pos} references variable {i} but num_vars is {n}")
            if c.priority in seen:
                raise SpecError(
                    f"duplicate priority {c.priority} (constraints {seen[c.priority]} and {pos})")
            seen[c.priority] = pos
        object.__setattr__(self, "num_vars", n)
        object.__setattr__(self, "constraints", cons)

    def __len__(self) -> int:
        return len(self.constraints)

    @cached_property
    def rows(self) -> "_RowArrays":
        """Packed row arrays for the compiled kernels (built once, read-only)."""
        return _RowArrays(self.constraints)

    @cached_property
    def priority_order(self) -> tuple[int, ...]:
        """Constraint ids sorted by rank, most important first."""
        return tuple(sorted(range(len(self.constraints)),
                            key=lambda i: self.constraints[i].priority))

    @cached_property
    def rank_position(self) -> tuple[int, ...]:
        """rank_position[id] = position of the constraint in priority order."""
        pos = [0] * len(self.constraints)
        for p, cid in enumerate(self.priority_order):
            pos[cid] = p
        return tuple(pos)


class _RowArrays:
    """CSR-style views of a constraint list, shared by all kernel calls."""

    __slots__ = ("indptr", "indices", "coefs", "rhs", "rel", "sqnorm", "normdiv")

    def __init__(self, constraints: Sequence[Constraint]):
        nnz = sum(len(c.terms) for c in constraints)
        m = len(constraints)
        self.indptr = np.zeros(m + 1, dtype=np.int64)
        self.indices = np.zeros(nnz, dtype=np.int64)
        self.coefs = np.zeros(nnz, dtype=np.float64)
        self.rhs = np.zeros(m, dtype=np.float64)
        self.rel = np.zeros(m, dtype=np.uint8)
        self.sqnorm = np.zeros(m, dtype=np.float64)
        self.normdiv = np.zeros(m, dtype=np.float64)
        k = 0
        for r, c in enumerate(constraints):
            for i, a in c.terms:
                self.indices[k] = i
                self.coefs[k] = a
                k += 1
            self.indptr[r + 1] = k
            self.rhs[r] = c.rhs
            self.rel[r] = c.relation.code
            self.sqnorm[r] = c.squared_norm
            self.normdiv[r] = max(1.0, np.sqrt(c.squared_norm))
        for arr in (self.indptr, self.indices, self.coefs, self.rhs, self.rel,
                    self.sqnorm, self.normdiv):
            arr.setflags(write=False)


def residual(c: Constraint, x: np.ndarray) -> float:
    """Signed raw residual b - a.x (positive means the row sum is short)."""
    s = 0.0
    for i, a in c.terms:
        s += a * x[i]
    return c.rhs - s


def violation(c: Constraint, x: np.ndarray) -> float:
    """How far the row is from being satisfied; 0 means satisfied.

    EQ -> |residual|, LE -> max(0, -residual), GE -> max(0, residual).
    """
    r = residual(c, x)
    if c.relation is Relation.EQ:
        return abs(r)
    if c.relation is Relation.LE:
        return -r if r < 0.0 else 0.0
    return r if r > 0.0 else 0.0


def enabled_row_array(s: Specification, enabled: Iterable[int]) -> np.ndarray:
    """Validated, sorted (specification order) int64 array of constraint ids.

    May alias the input when it is already a sorted int64 array; callers
    must treat the result as read-only.
    """
    if isinstance(enabled, np.ndarray) and enabled.dtype == np.int64:
        rows = enabled
        if rows.size > 1 and not np.all(rows[1:] > rows[:-1]):
            rows = np.sort(rows)
    else:
        rows = np.fromiter((int(i) for i in enabled), dtype=np.int64)
        rows.sort()
    if rows.size:
        if rows[0] < 0 or rows[-1] >= len(s.constraints):
            bad = rows[0] if rows[0] < 0 else rows[-1]
            raise SpecError(f"constraint id {bad} out of range")
        if np.any(rows[1:] == rows[:-1]):
            raise SpecError("duplicate constraint id in enabled set")
    return rows


def max_violation(s: Specification, enabled: Iterable[int], x: np.ndarray) -> float:
    """max over the enabled rows of violation / max(1, row norm); 0 if empty.

    This scaled error is the solver's convergence measure throughout.
    """
    rows = enabled if isinstance(enabled, np.ndarray) else enabled_row_array(s, enabled)
    r = s.rows
    return _kernels.max_scaled_violation(r.indptr, r.indices, r.coefs, r.rhs,
                                         r.rel, r.normdiv, rows, x)
