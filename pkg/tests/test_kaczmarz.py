"""Row projection, sweep order, solve exit rules, determinism."""

import numpy as np
import pytest

from conftest import planted_system, row, spec_of
from hiersolve import (Selection, SolverConfig, SpecError, max_violation,
                       project_row, solve, sweep)


def test_project_row_basics():
    x = project_row(np.array([3.0, 0.0]), row(0, "eq", 5, (0, 1.0)), 1.0)
    assert list(x) == [5.0, 0.0]
    x = project_row(np.zeros(2), row(0, "eq", 2, (0, 1.0), (1, 1.0)), 1.0)
    assert list(x) == [1.0, 1.0]
    x = project_row(np.array([0.0, 0.0]), row(0, "eq", 4, (0, 1.0)), 0.5)
    assert list(x) == [2.0, 0.0]


def test_satisfied_inequality_is_untouched_bitwise():
    x = np.array([3.0, -0.0])
    before = x.tobytes()
    out = project_row(x, row(0, "le", 5, (0, 1.0)), 1.0)
    assert out is x and x.tobytes() == before
    out = project_row(x, row(0, "ge", 1, (0, 1.0)), 1.7)
    assert x.tobytes() == before


def test_violated_inequality_projects_to_boundary():
    x = project_row(np.array([7.0]), row(0, "le", 5, (0, 1.0)), 1.0)
    assert x[0] == 5.0
    x = project_row(np.array([1.0]), row(0, "ge", 5, (0, 2.0)), 1.0)
    assert x[0] == 2.5


def test_project_row_touches_only_term_variables():
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.normal(size=8)
        keep = x.copy()
        idx = np.sort(rng.choice(8, size=int(rng.integers(1, 4)), replace=False))
        c = row(0, "eq", float(rng.normal()),
                *((int(i), float(rng.uniform(0.5, 2.0))) for i in idx))
        project_row(x, c, float(rng.uniform(0.1, 1.9)))
        outside = np.setdiff1d(np.arange(8), idx)
        assert np.array_equal(x[outside], keep[outside])


def test_project_row_rejects_bad_omega():
    for omega in (0.0, 2.0, -1.0):
        with pytest.raises(SpecError, match=r"\(0, 2\)"):
            project_row(np.zeros(1), row(0, "eq", 1, (0, 1.0)), omega)


def test_sweep_visits_enabled_rows_in_spec_order():
    s = spec_of(2, row(0, "eq", 1, (0, 1.0)), row(1, "eq", 2, (1, 1.0)))
    x = sweep(np.zeros(2), s, [0, 1], SolverConfig(), np.random.default_rng(0))
    assert list(x) == [1.0, 2.0]
    x = sweep(np.zeros(1), spec_of(1, row(0, "eq", 1, (0, 1.0))), [0],
              SolverConfig(), np.random.default_rng(0))
    assert list(x) == [1.0]


def test_sweep_rejects_empty_enabled_set():
    s = spec_of(1, row(0, "eq", 1, (0, 1.0)))
    with pytest.raises(SpecError, match="non-empty"):
        sweep(np.zeros(1), s, [], SolverConfig(), np.random.default_rng(0))


def test_solve_symmetric_intersection():
    s = spec_of(2, row(0, "eq", 2, (0, 1.0), (1, 1.0)),
                row(1, "eq", 0, (0, 1.0), (1, -1.0)))
    out = solve(s, [0, 1])
    assert out.converged and out.sweeps_used == 1
    assert np.allclose(out.x, [1.0, 1.0])
    assert out.final_error == 0.0


def test_solve_oscillating_pair_stalls():
    # cyclic omega=1 bounces between the two targets; the error history is
    # flat at 1.0 so the window heuristic fires exactly at stall_window
    s = spec_of(1, row(0, "eq", 0, (0, 1.0)), row(1, "eq", 1, (0, 1.0)))
    out = solve(s, [0, 1])
    assert not out.converged
    assert out.sweeps_used == 10
    assert out.final_error == 1.0
    assert list(out.x) == [1.0]


def test_solve_budget_exhaustion():
    s = spec_of(1, row(0, "eq", 0, (0, 1.0)), row(1, "eq", 1, (0, 1.0)))
    cfg = SolverConfig(max_sweeps=17, stall_window=100)
    out = solve(s, [0, 1], None, cfg)
    assert not out.converged and out.sweeps_used == 17


def test_solve_empty_enabled_set():
    s = spec_of(2, row(0, "eq", 1, (0, 1.0)))
    x0 = np.array([4.0, 5.0])
    out = solve(s, [], x0)
    assert out.converged and out.sweeps_used == 0 and out.final_error == 0.0
    assert list(out.x) == [4.0, 5.0]
    assert out.x is not x0  # solver owns its iterate


def test_solve_checks_convergence_at_entry():
    s = spec_of(1, row(0, "eq", 1, (0, 1.0)))
    out = solve(s, [0], np.array([1.0]))
    assert out.converged and out.sweeps_used == 0


def test_converged_implies_error_within_tolerance():
    rng = np.random.default_rng(17)
    for _ in range(40):
        s, _ = planted_system(rng, max_vars=12, max_rows=15)
        cfg = SolverConfig(omega=float(rng.uniform(0.3, 1.7)),
                           selection=("cyclic", "uniform", "norm-weighted")[int(rng.integers(3))],
                           seed=int(rng.integers(1000)))
        out = solve(s, range(len(s)), None, cfg)
        if out.converged:
            assert out.final_error <= cfg.tolerance
            assert out.final_error == max_violation(s, range(len(s)), out.x)


def test_cyclic_solve_matches_pure_python_projections():
    rng = np.random.default_rng(7)
    for _ in range(20):
        s, _ = planted_system(rng, max_vars=6, max_rows=6)
        cfg = SolverConfig(omega=1.3, tolerance=1e-9, max_sweeps=5, stall_window=99)
        got = solve(s, range(len(s)), None, cfg)
        x = np.zeros(s.num_vars)
        for _k in range(got.sweeps_used):
            for c in s.constraints:
                project_row(x, c, 1.3)
        assert np.array_equal(got.x, x)
        assert got.final_error == max_violation(s, range(len(s)), x)


def test_identical_inputs_give_bitwise_identical_outcomes():
    rng = np.random.default_rng(23)
    s, _ = planted_system(rng, max_vars=20, max_rows=25)
    for selection in Selection:
        cfg = SolverConfig(omega=0.9, selection=selection, seed=99)
        a = solve(s, range(len(s)), None, cfg)
        b = solve(s, range(len(s)), None, cfg)
        assert a.x.tobytes() == b.x.tobytes()
        assert (a.converged, a.sweeps_used, a.final_error) == \
            (b.converged, b.sweeps_used, b.final_error)


def test_random_selection_modes_solve_consistent_systems():
    rng = np.random.default_rng(31)
    s, _ = planted_system(rng, max_vars=10, max_rows=12)
    for selection in ("uniform", "norm-weighted"):
        out = solve(s, range(len(s)), None,
                    SolverConfig(selection=selection, seed=1, max_sweeps=5000))
        assert out.converged


def test_config_validation():
    with pytest.raises(SpecError, match=r"omega must lie in the open interval \(0, 2\)"):
        SolverConfig(omega=2.0)
    with pytest.raises(SpecError, match="omega"):
        SolverConfig(omega=0.0)
    with pytest.raises(SpecError, match="tolerance must be positive"):
        SolverConfig(tolerance=0.0)
    with pytest.raises(SpecError, match="max_sweeps"):
        SolverConfig(max_sweeps=0)
    with pytest.raises(SpecError, match="stall_window"):
        SolverConfig(stall_window=0)
    with pytest.raises(SpecError, match=r"stall_factor must lie in \(0, 1\)"):
        SolverConfig(stall_factor=1.0)
    with pytest.raises(SpecError, match="unknown selection"):
        SolverConfig(selection="roulette")


def test_selection_accepts_mode_strings():
    assert SolverConfig(selection="uniform").selection is Selection.UNIFORM_RANDOM
    assert SolverConfig(selection="norm-weighted").selection is Selection.NORM_WEIGHTED
    assert SolverConfig(selection="cyclic").selection is Selection.CYCLIC
