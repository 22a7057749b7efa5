"""Timing experiments, sub-optimality counts, cubic fits, CSV plumbing.

A benchmark row is one (spec, solver) pair: the solver runs end-to-end
(conflict resolution plus solving; a dense least-squares pass for the
direct method), wall-clock time is the median over repetitions, and the
solution quality fields are recomputed after timing. All solvers in an
experiment consume the exact same generated suite.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from statistics import median
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import oracle
from .generator import LayoutSpec, suite_hash
from .kaczmarz import SolverConfig, solve as kaczmarz_solve
from .model import SpecError, Specification, enabled_row_array, max_violation, violation
from .relaxation import DEFAULT_OMEGA, relax_solve
from .resolution import characteristic_integer, resolve
from .validation import zero_assignment

SOLVER_NAMES = ("kaczmarz", "relaxation", "qr")
CSV_HEADER = ("solver", "c", "run", "time_ms", "converged", "suboptimal",
              "enabled", "iota_hex")
PHASES = ("full", "solve-only")


@dataclass(frozen=True)
class BenchmarkRecord:
    solver: str
    c: int
    run: int
    time_ms: float
    converged: bool
    suboptimal: int
    enabled: int
    iota: int


class RegressionFit(NamedTuple):
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    r_squared: float

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.beta0, self.beta1, self.beta2, self.beta3)


def count_suboptimal(s: Specification, enabled, x, tolerance: float = 0.01) -> int:
    """Enabled constraints whose scaled violation exceeds the tolerance.

    Uses the same row scaling as the solvers' convergence measure, so a
    converged result always counts zero.
    """
    rows = enabled_row_array(s, enabled)
    normdiv = s.rows.normdiv
    return sum(1 for cid in rows
               if violation(s.constraints[int(cid)], x) / normdiv[cid] > tolerance)


def default_config(solver: str) -> SolverConfig:
    if solver == "relaxation":
        return SolverConfig(omega=DEFAULT_OMEGA)
    return SolverConfig()


def _run_once(solver: str, spec: Specification, cfg: SolverConfig, phase: str):
    """One untimed end-to-end pass; returns (enabled ids, x, converged)."""
    if solver == "qr":
        rows = range(len(spec.constraints))
        x = oracle.least_squares_dense(spec, rows)
        return frozenset(rows), x, max_violation(spec, rows, x) <= cfg.tolerance
    backend = kaczmarz_solve if solver == "kaczmarz" else relax_solve
    result = resolve(spec, cfg, backend=backend)
    if phase == "solve-only":
        outcome = backend(spec, sorted(result.enabled),
                          zero_assignment(spec.num_vars), cfg)
        return result.enabled, outcome.x, outcome.converged
    err = max_violation(spec, result.enabled, result.solution)
    return result.enabled, result.solution, err <= cfg.tolerance


def time_solver(solver: str, spec: Specification, cfg: SolverConfig | None = None,
                repetitions: int = 1, run: int = 0,
                phase: str = "full") -> BenchmarkRecord:
    """Median wall-clock of `repetitions` single-threaded passes.

    The first pass is discarded as warm-up when repetitions >= 3. With
    `phase="solve-only"` conflict resolution runs untimed and only the final
    solve of the surviving set is measured (moot for the direct method).
    """
    if solver not in SOLVER_NAMES:
        raise SpecError(f"unknown solver {solver!r}, expected one of {', '.join(SOLVER_NAMES)}")
    if phase not in PHASES:
        raise SpecError(f"unknown phase {phase!r}, expected one of {', '.join(PHASES)}")
    if repetitions < 1:
        raise SpecError(f"repetitions must be >= 1, got {repetitions}")
    if cfg is None:
        cfg = default_config(solver)
    if phase == "solve-only" and solver != "qr":
        backend = kaczmarz_solve if solver == "kaczmarz" else relax_solve
        enabled = sorted(resolve(spec, cfg, backend=backend).enabled)

        def task():
            return backend(spec, enabled, zero_assignment(spec.num_vars), cfg)

        timings = []
        outcome = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            outcome = task()
            timings.append(time.perf_counter() - t0)
        x, converged = outcome.x, outcome.converged
        kept = frozenset(enabled)
    else:
        timings = []
        kept = x = converged = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            kept, x, converged = _run_once(solver, spec, cfg, phase)
            timings.append(time.perf_counter() - t0)
    if repetitions >= 3:
        timings = timings[1:]
    return BenchmarkRecord(
        solver=solver,
        c=len(spec.constraints),
        run=run,
        time_ms=median(timings) * 1000.0,
        converged=bool(converged),
        suboptimal=count_suboptimal(spec, kept, x, cfg.tolerance),
        enabled=len(kept),
        iota=characteristic_integer(spec, kept),
    )


def _prewarm(solvers: Sequence[str]) -> None:
    """Trigger kernel compilation outside the timed sections."""
    from .generator import generate_layout
    spec = generate_layout(2, seed=0).spec
    for name in solvers:
        if name in ("kaczmarz", "relaxation"):
            _run_once(name, spec, default_config(name), "full")


def run_experiment(suite: Iterable[LayoutSpec], solvers: Sequence[str],
                   cfg: SolverConfig | None = None, repetitions: int = 1,
                   phase: str = "full",
                   progress: Callable[[BenchmarkRecord], None] | None = None):
    """Benchmark every (spec, solver) pair of the suite.

    Returns (records, suite sha256). Rows come out suite-major with solvers
    innermost; each solver sees the identical materialized suite. Run
    indices restart at 0 within each constraint count.
    """
    for name in solvers:
        if name not in SOLVER_NAMES:
            raise SpecError(f"unknown solver {name!r}, expected one of {', '.join(SOLVER_NAMES)}")
    _prewarm(solvers)
    layouts = list(suite)
    digest = suite_hash(layouts)
    records: list[BenchmarkRecord] = []
    runs_seen: dict[int, int] = {}
    for layout in layouts:
        c = len(layout.spec.constraints)
        run = runs_seen.get(c, 0)
        runs_seen[c] = run + 1
        for name in solvers:
            record = time_solver(name, layout.spec, cfg, repetitions, run, phase)
            records.append(record)
            if progress is not None:
                progress(record)
    return records, digest


def write_csv(records: Iterable[BenchmarkRecord], destination) -> None:
    """RFC-4180 CSV with the fixed benchmark header; booleans lowercase."""
    own = not hasattr(destination, "write")
    fh = open(destination, "w", newline="", encoding="utf-8") if own else destination
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.solver, r.c, r.run, repr(r.time_ms),
                             "true" if r.converged else "false",
                             r.suboptimal, r.enabled, hex(r.iota)])
    finally:
        if own:
            fh.close()


def read_csv(source) -> list[BenchmarkRecord]:
    own = not hasattr(source, "read")
    fh = open(source, "r", newline="", encoding="utf-8") if own else source
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_HEADER):
            raise SpecError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise SpecError(f"malformed CSV row: {row}")
            records.append(BenchmarkRecord(
                solver=row[0], c=int(row[1]), run=int(row[2]),
                time_ms=float(row[3]), converged=row[4] == "true",
                suboptimal=int(row[5]), enabled=int(row[6]),
                iota=int(row[7], 16)))
        return records
    finally:
        if own:
            fh.close()


def fit_polynomial(points, degree: int = 3) -> RegressionFit:
    """Least-squares polynomial fit of T against c with R².

    Degree is capped at 3 (the reported model); lower degrees zero-fill the
    trailing coefficients. The design matrix is built on c rescaled by its
    largest magnitude to keep the factorization well conditioned, and the
    coefficients are mapped back to the raw scale.
    """
    if not 1 <= degree <= 3:
        raise SpecError(f"degree must be between 1 and 3, got {degree}")
    pts = [(float(c), float(t)) for c, t in points]
    if len({c for c, _ in pts}) < degree + 1:
        raise SpecError(f"need at least {degree + 1} distinct sizes for a "
                        f"degree-{degree} fit, got {len({c for c, _ in pts})}")
    xs = np.array([c for c, _ in pts], dtype=np.float64)
    ys = np.array([t for _, t in pts], dtype=np.float64)
    scale = max(float(np.max(np.abs(xs))), 1.0)
    design = np.vander(xs / scale, degree + 1, increasing=True)
    beta_scaled = oracle.lstsq(design, ys)
    beta = beta_scaled / scale ** np.arange(degree + 1)
    ss_res = float(np.sum((ys - design @ beta_scaled) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    full = np.zeros(4, dtype=np.float64)
    full[: degree + 1] = beta
    return RegressionFit(full[0], full[1], full[2], full[3], r2)


def fit_cubic(points) -> RegressionFit:
    return fit_polynomial(points, degree=3)
