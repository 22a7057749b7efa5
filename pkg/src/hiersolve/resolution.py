"""Greedy conflict resolution over prioritized constraints.

Constraints are admitted one at a time in priority order (rank 0 first).
Each candidate is tried against the solver backend together with everything
admitted so far; it stays only if the system still converges. The admitted
set is summarized by a characteristic integer that orders outcomes
lexicographically by rank, so "bigger" always means "kept a more important
constraint".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .kaczmarz import SolveOutcome, SolverConfig
from .kaczmarz import solve as kaczmarz_solve
from .model import Specification
from .validation import zero_assignment

Backend = Callable[[Specification, Sequence[int], np.ndarray, SolverConfig], SolveOutcome]


class AttemptRecord(NamedTuple):
    constraint: int
    accepted: bool
    sweeps_used: int


@dataclass(frozen=True, eq=False)
class ResolutionResult:
    enabled: frozenset[int]
    iota: int
    solution: np.ndarray
    attempts: tuple[AttemptRecord, ...]

    @property
    def total_sweeps(self) -> int:
        return sum(a.sweeps_used for a in self.attempts)


def characteristic_integer(s: Specification, enabled) -> int:
    """Encode a subset as sum of 2**(m - 1 - rank) over its members.

    Rank is the position in the priority order, so the highest-priority
    constraint owns the most significant of the m bits.
    """
    pos = s.rank_position
    m = len(s.constraints)
    total = 0
    for cid in set(enabled):
        total += 1 << (m - 1 - pos[cid])
    return total


def resolve(s: Specification, cfg: SolverConfig = SolverConfig(),
            backend: Backend = kaczmarz_solve) -> ResolutionResult:
    """Run the greedy admission pass and return the surviving subset.

    Starts from the empty set and the zero assignment. Every accepted
    solve's endpoint warm-starts the next attempt, so late constraints are
    judged from a point already compatible with their seniors.
    """
    enabled = np.empty(0, dtype=np.int64)
    x = zero_assignment(s.num_vars)
    attempts: list[AttemptRecord] = []
    for cid in s.priority_order:
        # keep the id array sorted so cyclic backends sweep in spec order
        trial = np.insert(enabled, int(np.searchsorted(enabled, cid)), cid)
        outcome = backend(s, trial, x, cfg)
        if outcome.converged:
            enabled = trial
            x = outcome.x
        attempts.append(AttemptRecord(cid, outcome.converged, outcome.sweeps_used))
    kept = frozenset(int(i) for i in enabled)
    return ResolutionResult(kept, characteristic_integer(s, kept), x, tuple(attempts))
