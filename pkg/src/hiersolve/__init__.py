"""Prioritized sparse linear constraint solving by row projection.

Constraint systems carry a strict priority order; when they conflict, a
greedy resolver keeps the highest-priority satisfiable subset and the
iterative solvers (Kaczmarz projections or pivot relaxation) compute a
solution of what survives. Includes an exact dense oracle, a random layout
generator, and a benchmarking harness.
"""

from .bench import (BenchmarkRecord, RegressionFit, count_suboptimal,
                    fit_cubic, fit_polynomial, read_csv, run_experiment,
                    time_solver, write_csv)
from .estimators import KaczmarzSolver, LeastSquaresSolver, RelaxationSolver
from .generator import (LayoutSpec, WidgetBox, generate_layout,
                        generate_suite, suite_hash, suite_index, suite_seed,
                        write_suite)
from .kaczmarz import (Selection, SolveOutcome, SolverConfig, project_row,
                       solve, sweep)
from .model import (Constraint, Relation, SpecError, Specification,
                    max_violation, residual, violation)
from .oracle import (exact_backend, feasibility_witness, feasible_exact,
                     least_squares_dense, lstsq, max_feasible_iota)
from .relaxation import DEFAULT_OMEGA, assign_pivots_random, relax_solve
from .resolution import (AttemptRecord, ResolutionResult,
                         characteristic_integer, resolve)
from .specfile import (SpecFormatError, parse_specification,
                       serialize_specification)

__version__ = "0.1.0"

__all__ = [
    "AttemptRecord", "BenchmarkRecord", "Constraint", "DEFAULT_OMEGA",
    "KaczmarzSolver", "LayoutSpec", "LeastSquaresSolver", "RegressionFit",
    "Relation", "RelaxationSolver", "ResolutionResult", "Selection",
    "SolveOutcome", "SolverConfig", "SpecError", "SpecFormatError",
    "Specification", "WidgetBox", "assign_pivots_random",
    "characteristic_integer", "count_suboptimal", "exact_backend",
    "feasibility_witness", "feasible_exact", "fit_cubic", "fit_polynomial",
    "generate_layout", "generate_suite", "least_squares_dense", "lstsq",
    "max_feasible_iota", "max_violation", "parse_specification",
    "project_row", "read_csv", "relax_solve", "residual", "resolve",
    "run_experiment", "serialize_specification", "solve", "suite_hash",
    "suite_index", "suite_seed", "sweep", "time_solver", "violation", "write_csv",
    "write_suite", "__version__",
]
