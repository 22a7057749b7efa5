"""Command-line interface.

Exit codes: 0 success, 2 bad input (unreadable or malformed files, data
that cannot be solved as requested), 3 bad usage (invalid flags or flag
combinations). Argparse's own failures are remapped from its default 2 to
3 so the two classes stay distinct for scripts.
"""

from __future__ import annotations

import argparse
import json
import sys
from statistics import median

from . import bench
from .generator import generate_layout, generate_suite
from .kaczmarz import SolverConfig, solve as kaczmarz_solve
from .model import SpecError, max_violation
from .oracle import least_squares_dense
from .relaxation import DEFAULT_OMEGA, relax_solve
from .resolution import characteristic_integer, resolve
from .specfile import parse_specification, serialize_specification


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _window(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        pair = (float(w), float(h))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if not (pair[0] > 0 and pair[1] > 0):
        raise argparse.ArgumentTypeError(f"window sides must be positive, got {text!r}")
    return pair


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hiersolve",
                     description="Prioritized linear constraint solving, "
                                 "layout generation, and benchmarking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[], help="resolve and solve a spec file")
    p.add_argument("spec_file")
    p.add_argument("--solver", choices=("kaczmarz", "relaxation", "qr"),
                   default="kaczmarz")
    p.add_argument("--omega", type=float, default=None,
                   help="relaxation parameter; defaults per solver")
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--max-sweeps", type=int, default=1000)
    p.add_argument("--selection", choices=("cyclic", "uniform", "norm-weighted"),
                   default="cyclic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("generate", help="write a random layout spec file")
    p.add_argument("--widgets", type=_positive_int, required=True)
    p.add_argument("--window", type=_window, default=(800.0, 600.0),
                   metavar="WxH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-bounds", action="store_true",
                   help="add two minimum-size inequalities per widget")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("bench", help="time solvers over a generated suite")
    p.add_argument("--min", type=_positive_int, required=True,
                   help="smallest widget count")
    p.add_argument("--max", type=_positive_int, required=True)
    p.add_argument("--step", type=_positive_int, default=1)
    p.add_argument("--runs", type=_positive_int, default=1,
                   help="layouts per size")
    p.add_argument("--solvers", required=True,
                   help="comma-separated subset of kaczmarz,relaxation,qr")
    p.add_argument("--out", required=True)
    p.add_argument("--repetitions", type=_positive_int, default=1)
    p.add_argument("--phase", choices=bench.PHASES, default="full")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("fit", help="fit T(c) polynomials to bench output")
    p.add_argument("results_csv")
    p.add_argument("--solver", default=None)
    p.add_argument("--degree", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--plot-data", default=None, metavar="PREFIX",
                   help="also write PREFIX_<solver>.dat files of (c, median T)")
    p.set_defaults(func=_cmd_fit)
    return parser


def _config_for(args, solver: str) -> SolverConfig:
    omega = args.omega
    if omega is None:
        omega = DEFAULT_OMEGA if solver == "relaxation" else 1.0
    try:
        return SolverConfig(omega=omega, tolerance=args.tol,
                            max_sweeps=args.max_sweeps,
                            selection=args.selection, seed=args.seed)
    except SpecError as exc:
        raise _UsageError(str(exc)) from None


def _cmd_solve(args) -> int:
    cfg = _config_for(args, args.solver)
    with open(args.spec_file, "r", encoding="utf-8") as fh:
        spec = parse_specification(fh.read())
    m = len(spec.constraints)
    if args.solver == "qr":
        x = least_squares_dense(spec, range(m))
        enabled, sweeps = frozenset(range(m)), 0
    else:
        backend = kaczmarz_solve if args.solver == "kaczmarz" else relax_solve
        result = resolve(spec, cfg, backend=backend)
        x, enabled, sweeps = result.solution, result.enabled, result.total_sweeps
    err = max_violation(spec, enabled, x)
    iota = characteristic_integer(spec, enabled)
    if args.json:
        payload = {
            "solver": args.solver,
            "x": [float(v) for v in x],
            "enabled": sorted(enabled),
            "constraints": m,
            "iota": hex(iota),
            "max_violation": float(err),
            "sweeps": sweeps,
        }
        print(json.dumps(payload))
    else:
        for i, v in enumerate(x):
            print(f"x{i} = {_fmt(v)}")
        print(f"enabled = {len(enabled)} of {m}")
        print(f"iota = {hex(iota)}")
        print(f"max_violation = {_fmt(err)}")
        print(f"sweeps = {sweeps}")
    return 0


def _cmd_generate(args) -> int:
    layout = generate_layout(args.widgets, args.window, args.seed,
                             args.with_bounds)
    text = serialize_specification(layout.spec)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {len(layout.spec.constraints)} constraints to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if not solvers:
        raise _UsageError("--solvers must name at least one solver")
    for name in solvers:
        if name not in bench.SOLVER_NAMES:
            raise _UsageError(f"unknown solver {name!r}, expected a subset of "
                              f"{','.join(bench.SOLVER_NAMES)}")
    if args.max < args.min:
        raise _UsageError(f"--max must be >= --min, got {args.max} < {args.min}")
    suite = generate_suite(args.min, args.max, args.step, args.runs,
                           base_seed=args.seed)

    def progress(record: bench.BenchmarkRecord) -> None:
        print(f"c={record.c:5d} run={record.run} {record.solver:<10s} "
              f"{record.time_ms:10.3f} ms", file=sys.stderr)

    records, digest = bench.run_experiment(suite, solvers,
                                           repetitions=args.repetitions,
                                           phase=args.phase, progress=progress)
    bench.write_csv(records, args.out)
    print(f"suite sha256 {digest}", file=sys.stderr)
    print(f"wrote {len(records)} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_fit(args) -> int:
    records = bench.read_csv(args.results_csv)
    by_solver: dict[str, list[bench.BenchmarkRecord]] = {}
    for r in records:
        by_solver.setdefault(r.solver, []).append(r)
    if args.solver is not None:
        if args.solver not in by_solver:
            raise SpecError(f"no rows for solver {args.solver!r} in {args.results_csv}")
        names = [args.solver]
    else:
        names = list(by_solver)
    for name in names:
        points = [(r.c, r.time_ms) for r in by_solver[name]]
        fit = bench.fit_polynomial(points, degree=args.degree)
        fields = " ".join(_fmt(v) for v in (*fit.coefficients, fit.r_squared))
        print(fields if args.solver is not None else f"{name}: {fields}")
        if args.plot_data is not None:
            _write_plot_data(f"{args.plot_data}_{name}.dat", by_solver[name])
    return 0


def _write_plot_data(path: str, records) -> None:
    by_c: dict[int, list[float]] = {}
    for r in records:
        by_c.setdefault(r.c, []).append(r.time_ms)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# c time_ms\n")
        for c in sorted(by_c):
            fh.write(f"{c} {_fmt(median(by_c[c]))}\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
