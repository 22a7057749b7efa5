"""Line-oriented text format for constraint specifications.

    # comment lines and blank lines are ignored
    vars <n>
    c <priority> <op> <rhs> <idx>:<coef> [<idx>:<coef> ...]

op is one of eq, le, ge. Numbers round-trip exactly: the serializer emits
repr() of the float64 values.
"""

from __future__ import annotations

from .model import Constraint, Relation, SpecError, Specification

_OPS = {r.value: r for r in Relation}


class SpecFormatError(SpecError):
    """Malformed specification text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def parse_specification(text: str) -> Specification:
    num_vars = None
    header_line = None
    constraints: list[Constraint] = []
    priority_lines: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "vars":
            if num_vars is not None:
                raise SpecFormatError(
                    f"duplicate vars header (first on line {header_line})", lineno)
            if len(fields) != 2:
                raise SpecFormatError("expected: vars <n>", lineno)
            num_vars = _parse_int(fields[1], "variable count", lineno)
            if num_vars <= 0:
                raise SpecFormatError(f"variable count must be positive, got {num_vars}", lineno)
            header_line = lineno
        elif fields[0] == "c":
            if num_vars is None:
                raise SpecFormatError("constraint before vars header", lineno)
            constraints.append(
                _parse_constraint(fields, num_vars, lineno, priority_lines))
        else:
            raise SpecFormatError(f"unknown directive {fields[0]!r}", lineno)
    if num_vars is None:
        raise SpecFormatError("missing vars header")
    try:
        return Specification(num_vars, tuple(constraints))
    except SpecError as exc:  # line-level checks above should make this unreachable
        raise SpecFormatError(str(exc)) from exc


def _parse_constraint(fields, num_vars, lineno, priority_lines):
    if len(fields) < 4:
        raise SpecFormatError("expected: c <priority> <op> <rhs> <idx>:<coef> ...", lineno)
    priority = _parse_int(fields[1], "priority", lineno)
    if priority < 0:
        raise SpecFormatError(f"priority must be non-negative, got {priority}", lineno)
    if priority in priority_lines:
        raise SpecFormatError(
            f"duplicate priority {priority} (also on line {priority_lines[priority]})",
            lineno)
    op = fields[2]
    if op not in _OPS:
        raise SpecFormatError(f"unknown relation {op!r} (expected eq, le or ge)", lineno)
    rhs = _parse_float(fields[3], "right-hand side", lineno)
    if len(fields) == 4:
        raise SpecFormatError("empty constraint row", lineno)
    terms = []
    seen = set()
    for tok in fields[4:]:
        idx_s, sep, coef_s = tok.partition(":")
        if not sep:
            raise SpecFormatError(f"malformed term {tok!r} (expected <idx>:<coef>)", lineno)
        idx = _parse_int(idx_s, "variable index", lineno)
        coef = _parse_float(coef_s, "coefficient", lineno)
        if idx < 0 or idx >= num_vars:
            raise SpecFormatError(
                f"variable index {idx} out of range for {num_vars} variables", lineno)
        if coef == 0.0:
            raise SpecFormatError(f"zero coefficient on variable {idx}", lineno)
        if idx in seen:
            raise SpecFormatError(f"duplicate variable index {idx}", lineno)
        seen.add(idx)
        terms.append((idx, coef))
    terms.sort(key=lambda t: t[0])
    priority_lines[priority] = lineno
    try:
        return Constraint(tuple(terms), _OPS[op], rhs, priority)
    except SpecError as exc:
        raise SpecFormatError(str(exc), lineno) from exc


def _parse_int(token, what, lineno):
    try:
        return int(token)
    except ValueError:
        raise SpecFormatError(f"bad {what} {token!r}", lineno) from None


def _parse_float(token, what, lineno):
    try:
        value = float(token)
    except ValueError:
        raise SpecFormatError(f"bad {what} {token!r}", lineno) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise SpecFormatError(f"non-finite {what} {token!r}", lineno)
    return value


def serialize_specification(s: Specification) -> str:
    lines = [f"vars {s.num_vars}"]
    for c in s.constraints:
        terms = " ".join(f"{i}:{a!r}" for i, a in c.terms)
        lines.append(f"c {c.priority} {c.relation.value} {c.rhs!r} {terms}")
    return "\n".join(lines) + "\n"
