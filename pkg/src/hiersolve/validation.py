"""Input validation helpers shared by the solvers and estimators."""

from __future__ import annotations

import numpy as np

from .model import SpecError, Specification


def as_assignment(values, num_vars: int, copy: bool = True) -> np.ndarray:
    """Coerce to a float64 vector of length num_vars with finite entries."""
    x = np.array(values, dtype=np.float64, copy=copy).reshape(-1)
    if x.size != num_vars:
        raise SpecError(f"assignment has {x.size} entries, expected {num_vars}")
    if not np.all(np.isfinite(x)):
        raise SpecError("assignment contains non-finite entries")
    return x


def zero_assignment(num_vars: int) -> np.ndarray:
    return np.zeros(num_vars, dtype=np.float64)


def as_specification(obj) -> Specification:
    if not isinstance(obj, Specification):
        raise SpecError(f"expected a Specification, got {type(obj).__name__}")
    return obj
