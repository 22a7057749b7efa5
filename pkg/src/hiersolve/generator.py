"""Seeded random generator of window-layout constraint systems.

Layouts are built by recursive splitting: start from one widget filling the
window, then repeatedly cut a widget in two (sometimes docking a strip
against a window edge). Widget boundaries sit on shared tabstops, and the
tabstop coordinates are the solver variables. Every widget contributes two
hard positioning equalities and two soft preferred-size equalities, so a
k-widget layout has exactly 4k constraints; positioning rows always outrank
preference rows.

The positioning rows are emitted with offsets read from the construction
geometry, so they are satisfiable by design (the construction coordinates
are a witness). Preferred sizes are drawn independently of the geometry and
over-constrain the fixed window once layouts grow, which is what the
conflict resolver is for.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .model import Constraint, Relation, SpecError, Specification
from .specfile import serialize_specification

PREF_RANGE = (20.0, 200.0)
BOUND_RANGE = (5.0, 20.0)
DOCK_PROBABILITY = 0.25
CUT_RANGE = (0.25, 0.75)


class WidgetBox(NamedTuple):
    """Boundary tabstop ids of one widget (coordinates live elsewhere)."""
    left: int
    top: int
    right: int
    bottom: int


@dataclass(frozen=True)
class LayoutSpec:
    spec: Specification
    widgets: tuple[WidgetBox, ...]
    x_tabs: int
    y_tabs: int
    window: tuple[float, float]
    coords: np.ndarray

    def __post_init__(self):
        self.coords.setflags(write=False)


def _span_row(neg: int, pos: int, value: float):
    """Index-sorted terms for the row x[pos] - x[neg] = value."""
    if neg < pos:
        return ((neg, -1.0), (pos, 1.0)), value
    return ((pos, 1.0), (neg, -1.0)), value


def generate_layout(widgets: int, window=(800.0, 600.0), seed=0,
                    with_bounds: bool = False) -> LayoutSpec:
    """Build one layout with the given widget count.

    Deterministic in (widgets, window, seed, with_bounds). With
    `with_bounds` each widget also gets two minimum-size inequalities,
    ranked between positioning and preferences (6 rows per widget).
    """
    if widgets < 1:
        raise SpecError(f"widgets must be >= 1, got {widgets}")
    win_w, win_h = float(window[0]), float(window[1])
    if not (win_w > 0.0 and win_h > 0.0):
        raise SpecError(f"window sides must be positive, got {window}")
    rng = np.random.default_rng(seed)

    # tabstops 0..3 are the window frame: x=0, y=0, x=W, y=H
    coords = [0.0, 0.0, win_w, win_h]
    tabs = ([0, 2], [1, 3])  # per axis: 0 = x, 1 = y
    boxes = [WidgetBox(0, 1, 2, 3)]

    position_rows = [(((0, 1.0),), 0.0), (((1, 1.0),), 0.0)]
    prefs = [(boxes[0], rng.uniform(*PREF_RANGE), rng.uniform(*PREF_RANGE))]
    bounds = []
    if with_bounds:
        bounds.append((boxes[0], rng.uniform(*BOUND_RANGE), rng.uniform(*BOUND_RANGE)))

    for k in range(1, widgets):
        # pick the cut: the first split must take the root; afterwards either
        # dock a strip against a window edge or split any widget on a coin flip
        if k == 1:
            target, axis, near = 0, (0 if rng.random() < 0.5 else 1), False
        elif rng.random() < DOCK_PROBABILITY:
            edge = int(rng.integers(4))  # 0 left, 1 top, 2 right, 3 bottom
            touching = [i for i, bx in enumerate(boxes) if bx[edge] == edge]
            target = touching[int(rng.integers(len(touching)))]
            axis = 0 if edge in (0, 2) else 1
            near = edge in (0, 1)
        else:
            target = int(rng.integers(len(boxes)))
            axis = 0 if rng.random() < 0.5 else 1
            near = False
        frac = rng.uniform(*CUT_RANGE)

        bx = boxes[target]
        lo_tab, hi_tab = (bx.left, bx.right) if axis == 0 else (bx.top, bx.bottom)
        cut = len(coords)
        coords.append(coords[lo_tab] + frac * (coords[hi_tab] - coords[lo_tab]))
        tabs[axis].append(cut)
        if axis == 0:
            near_box, far_box = bx._replace(right=cut), bx._replace(left=cut)
        else:
            near_box, far_box = bx._replace(bottom=cut), bx._replace(top=cut)
        if near:
            boxes[target], new_box = far_box, near_box
        else:
            boxes[target], new_box = near_box, far_box
        boxes.append(new_box)

        if k == 1:
            # remaining window corner, completing the frame pins at top rank
            position_rows.append((((2, 1.0),), win_w))
            position_rows.append((((3, 1.0),), win_h))
        else:
            # place the cut as an offset from the window origin on its axis,
            # then fix the new widget's extent along the cut; origin-anchored
            # ties keep incremental re-solving cheap (no long relative chains)
            origin = 0 if axis == 0 else 1
            position_rows.append(_span_row(origin, cut, coords[cut]))
            if axis == 0:
                b_lo, b_hi = new_box.left, new_box.right
            else:
                b_lo, b_hi = new_box.top, new_box.bottom
            position_rows.append(_span_row(b_lo, b_hi, coords[b_hi] - coords[b_lo]))

        prefs.append((new_box, rng.uniform(*PREF_RANGE), rng.uniform(*PREF_RANGE)))
        if with_bounds:
            bounds.append((new_box, rng.uniform(*BOUND_RANGE), rng.uniform(*BOUND_RANGE)))

    constraints: list[Constraint] = []
    pref_base = (4 if with_bounds else 2) * widgets
    for k in range(widgets):
        for j in (0, 1):
            terms, rhs = position_rows[2 * k + j]
            constraints.append(Constraint(terms, Relation.EQ, rhs, 2 * k + j))
        if with_bounds:
            box, w_min, h_min = bounds[k]
            terms, rhs = _span_row(box.left, box.right, w_min)
            constraints.append(Constraint(terms, Relation.GE, rhs, 2 * widgets + 2 * k))
            terms, rhs = _span_row(box.top, box.bottom, h_min)
            constraints.append(Constraint(terms, Relation.GE, rhs, 2 * widgets + 2 * k + 1))
        box, w_pref, h_pref = prefs[k]
        terms, rhs = _span_row(box.left, box.right, w_pref)
        constraints.append(Constraint(terms, Relation.EQ, rhs, pref_base + 2 * k))
        terms, rhs = _span_row(box.top, box.bottom, h_pref)
        constraints.append(Constraint(terms, Relation.EQ, rhs, pref_base + 2 * k + 1))

    return LayoutSpec(
        spec=Specification(len(coords), tuple(constraints)),
        widgets=tuple(boxes),
        x_tabs=len(tabs[0]),
        y_tabs=len(tabs[1]),
        window=(win_w, win_h),
        coords=np.array(coords, dtype=np.float64),
    )


def suite_seed(base_seed: int, size: int, run: int) -> int:
    """Per-instance seed derived from (base_seed, size, run)."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(size, run))
    return int(ss.generate_state(1, np.uint64)[0])


def suite_index(min_widgets: int, max_widgets: int, step: int,
                runs_per_size: int, base_seed: int = 0) -> list[tuple[int, int, int]]:
    """(size, run, seed) rows of a suite, in generation order."""
    if min_widgets < 1:
        raise SpecError(f"min_widgets must be >= 1, got {min_widgets}")
    if max_widgets < min_widgets:
        raise SpecError(f"max_widgets must be >= min_widgets, got {max_widgets}")
    if step < 1 or runs_per_size < 1:
        raise SpecError("step and runs_per_size must be >= 1")
    return [(size, run, suite_seed(base_seed, size, run))
            for size in range(min_widgets, max_widgets + 1, step)
            for run in range(runs_per_size)]


def generate_suite(min_widgets: int, max_widgets: int, step: int = 1,
                   runs_per_size: int = 1, base_seed: int = 0,
                   window=(800.0, 600.0), with_bounds: bool = False) -> Iterator[LayoutSpec]:
    for size, _run, seed in suite_index(min_widgets, max_widgets, step, runs_per_size, base_seed):
        yield generate_layout(size, window, seed, with_bounds)


def suite_hash(layouts) -> str:
    """sha256 over the serialized suite; identifies the exact test data."""
    h = hashlib.sha256()
    for layout in layouts:
        h.update(serialize_specification(layout.spec).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def write_suite(directory, min_widgets: int, max_widgets: int, step: int = 1,
                runs_per_size: int = 1, base_seed: int = 0,
                window=(800.0, 600.0), with_bounds: bool = False) -> Path:
    """Write every suite member as a spec file plus an index.csv manifest.

    Returns the index path. Index columns: size, run, path (relative), seed.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index_path = directory / "index.csv"
    with open(index_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "run", "path", "seed"])
        for size, run, seed in suite_index(min_widgets, max_widgets, step,
                                           runs_per_size, base_seed):
            name = f"w{size:04d}_r{run:02d}.spec"
            layout = generate_layout(size, window, seed, with_bounds)
            (directory / name).write_text(serialize_specification(layout.spec),
                                          encoding="utf-8")
            writer.writerow([size, run, name, seed])
    return index_path
