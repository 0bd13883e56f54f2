"""The lattice equation on staircase initial data.

Coordinates are (m, n) with m the row (increasing upwards) and n the column
(increasing to the right). A staircase of height 1 is a list of steps, top
step first: step j sits on row ``m0 - j`` and covers columns
``n_j .. n_j + q_j`` (q_j + 1 cells, slots 1..q_j+1), with
``n_{j+1} = n_j + q_j``. Slot q_j+1 is the protruding corner of the step;
slot 1 sits directly below the corner of the step above.

Initial values equal to 0 are replaced by one shared formal parameter eps and
the evolution then runs in Laurent arithmetic.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DegenerateSample,
    ExactZeroReciprocal,
    IndeterminateStep,
    SameStepUnsupported,
    TruncationExhausted,
    UndeterminedLeading,
    WindowUndetermined,
)
from .exactnum import (
    INF_LIKE,
    ZERO_LIKE,
    EntrySignature,
    LaurentSeries,
    Projective,
    classify_entry,
    qq,
    qstr,
)
from .mapping import NE, SW, MapParams, lattice_step, random_rational

DEFAULT_TRUNCATION = 8
MAX_DOUBLINGS = 6

CASE1 = "Case1"
CASE2 = "Case2"
CASE3 = "Case3"
CASE4 = "Case4"
CASE5 = "Case5"
NO_INTERACTION = "NoInteraction"

OPEN = "open"
ANTICONFINING = "anticonfining"
NONSINGULAR = "nonsingular"

DEFAULT_GLYPHS = {"zero": "0", "inf": "8", "regular": ".", "initial": "u", "empty": " "}


@dataclass(frozen=True)
class Step:
    width: int
    values: tuple

    def __post_init__(self):
        if int(self.width) != self.width or self.width < 1:
            raise ValueError("step width must be an integer >= 1")
        vals = tuple(qq(v) for v in self.values)
        if len(vals) != self.width + 1:
            raise ValueError(f"a width-{self.width} step needs {self.width + 1} values")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Staircase:
    """Height-1 staircase; ``anchor`` is the (m, n) of slot 1 of the top step."""

    steps: tuple
    anchor: tuple = (0, 0)

    def __post_init__(self):
        steps = tuple(s if isinstance(s, Step) else Step(s["width"], s["values"]) for s in self.steps)
        if not steps:
            raise ValueError("staircase needs at least one step")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "anchor", (int(self.anchor[0]), int(self.anchor[1])))

    # geometry -------------------------------------------------------------

    def step_origin(self, j: int) -> tuple[int, int]:
        m0, n = self.anchor
        for s in self.steps[:j]:
            n += s.width
        return m0 - j, n

    def positions(self) -> Iterable[tuple]:
        """(m, n, step index, slot, value) for every cell, top step first."""
        for j, s in enumerate(self.steps):
            m, n0 = self.step_origin(j)
            for i, v in enumerate(s.values):
                yield m, n0 + i, j, i + 1, v

    def cells(self) -> dict:
        return {(m, n): v for m, n, _, _, v in self.positions()}

    @property
    def zero_marks(self) -> frozenset:
        return frozenset((m, n) for m, n, _, _, v in self.positions() if v == 0)

    def locate(self, pos) -> tuple[int, int]:
        for m, n, j, slot, _ in self.positions():
            if (m, n) == tuple(pos):
                return j, slot
        raise KeyError(f"{pos} is not on the staircase")

    def zero_type(self, j: int, slot: int) -> str:
        width = self.steps[j].width
        if slot == width + 1:
            return OPEN
        if 2 <= slot <= width:
            return ANTICONFINING
        return NONSINGULAR

    @property
    def bounds(self) -> tuple[int, int, int, int]:
        ms = [m for m, *_ in self.positions()]
        ns = [n for _, n, *_ in self.positions()]
        return min(ms), max(ms), min(ns), max(ns)

    def describe(self) -> list[dict]:
        return [{"width": s.width, "values": [qstr(v) for v in s.values]} for s in self.steps]

    # constructors ---------------------------------------------------------

    @classmethod
    def from_widths(
        cls,
        widths: Sequence[int],
        zeros: Iterable[tuple[int, int]] = (),
        seed: int = 0,
        anchor: tuple = (0, 0),
        bound: int = 50,
        values: Sequence[Sequence] | None = None,
    ) -> "Staircase":
        """Random nonzero values (or the given ones) with zeros at (step, slot) pairs."""
        rng = random.Random(seed)
        zeros = set(zeros)
        steps = []
        for j, w in enumerate(widths):
            if values is not None:
                vals = [qq(v) for v in values[j]]
            else:
                vals = [random_rational(rng, bound) for _ in range(w + 1)]
            for jj, slot in zeros:
                if jj == j:
                    if not 1 <= slot <= w + 1:
                        raise ValueError(f"slot {slot} outside step {j} of width {w}")
                    vals[slot - 1] = qq(0)
            steps.append(Step(w, tuple(vals)))
        return cls(tuple(steps), anchor)

    @classmethod
    def periodic(
        cls, q: int, values: Sequence, rows: Sequence[int], zero_rows: Iterable[int] | None = None
    ) -> "Staircase":
        """Width-q staircase with row r on columns ``-r*q .. -r*q + q``.

        Every row repeats ``values`` (the q+1 initial data of phi_q); rows in
        ``zero_rows`` keep their zeros, the others have them replaced by 1.
        ``rows`` are listed top first and must be consecutive.
        """
        rows = list(rows)
        if any(rows[i + 1] != rows[i] - 1 for i in range(len(rows) - 1)):
            raise ValueError("rows must be consecutive, top first")
        zero_rows = set(rows if zero_rows is None else zero_rows)
        steps = []
        for r in rows:
            vals = [qq(v) for v in values]
            if r not in zero_rows:
                vals = [v if v != 0 else qq(1) for v in vals]
            steps.append(Step(q, tuple(vals)))
        return cls(tuple(steps), (rows[0], -rows[0] * q))


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


@dataclass
class LatticeGrid:
    cells: dict
    window: tuple
    staircase: Staircase
    params: MapParams
    direction: str
    mode: str
    truncation: int | None = None

    def value(self, m: int, n: int):
        try:
            return self.cells[(m, n)]
        except KeyError:
            raise WindowUndetermined(f"cell ({m}, {n}) was not determined") from None

    def signature(self, m: int, n: int) -> EntrySignature:
        return classify_entry(self.value(m, n))

    def pattern(self, glyphs: dict | None = None) -> "PatternMap":
        return PatternMap.from_grid(self, glyphs)


def _in_window(window, m, n) -> bool:
    m_lo, m_hi, n_lo, n_hi = window
    return m_lo <= m <= m_hi and n_lo <= n <= n_hi


def _sweep(cells, window, p, direction):
    m_lo, m_hi, n_lo, n_hi = window
    if direction == NE:
        diagonals = range(m_lo + n_lo, m_hi + n_hi + 1)
        deps = ((-1, -1), (0, -1), (-1, 0))
    elif direction == SW:
        diagonals = range(m_hi + n_hi, m_lo + n_lo - 1, -1)
        deps = ((1, 1), (1, 0), (0, 1))
    else:
        raise ValueError(f"direction must be {NE!r} or {SW!r}")
    for s in diagonals:
        for m in range(max(m_lo, s - n_hi), min(m_hi, s - n_lo) + 1):
            n = s - m
            if (m, n) in cells:
                continue
            corner, side_m, side_n = ((m + dm, n + dn) for dm, dn in deps)
            if corner in cells and side_m in cells and side_n in cells:
                # NE: corner = x[m-1,n-1], x[m,n-1] (the "m+1,n" role), x[m-1,n]
                # SW: corner = x[m+1,n+1], x[m+1,n], x[m,n+1]
                cells[(m, n)] = lattice_step(
                    cells[corner], cells[side_m], cells[side_n], p, direction
                )


def evolve(
    stair: Staircase,
    p: MapParams,
    direction: str = NE,
    window: tuple | None = None,
    truncation: int | None = None,
    mode: str | None = None,
) -> LatticeGrid:
    """Fill every determined cell of ``window`` (m_lo, m_hi, n_lo, n_hi).

    The default window is the bounding box of the staircase, which contains
    everything the staircase determines in either direction. Laurent mode is
    chosen automatically when the staircase carries zeros; all zeros share
    one eps. In projective mode an indeterminate form raises
    IndeterminateStep.
    """
    if window is None:
        window = stair.bounds
    if mode is None:
        mode = "laurent" if stair.zero_marks else "projective"
    if mode == "projective":
        cells = {pos: Projective.finite(v) for pos, v in stair.cells().items()}
        try:
            _sweep(cells, window, p, direction)
        except IndeterminateStep as exc:
            raise IndeterminateStep(f"{exc}; rerun in Laurent mode with eps seeding") from exc
        return LatticeGrid(_windowed(cells, window, stair), window, stair, p, direction, mode)
    if mode != "laurent":
        raise ValueError("mode must be 'laurent' or 'projective'")
    trunc = truncation or DEFAULT_TRUNCATION
    for _ in range(MAX_DOUBLINGS + 1):
        cells = {}
        for pos, v in stair.cells().items():
            cells[pos] = LaurentSeries.epsilon(trunc) if v == 0 else LaurentSeries.constant(v)
        try:
            _sweep(cells, window, p, direction)
            for v in cells.values():
                classify_entry(v)
        except UndeterminedLeading:
            trunc *= 2
            continue
        except ExactZeroReciprocal as exc:
            raise DegenerateSample(
                f"a cell vanished identically ({exc}); perturb the staircase values"
            ) from exc
        return LatticeGrid(_windowed(cells, window, stair), window, stair, p, direction, mode, trunc)
    raise TruncationExhausted(f"leading terms still undetermined at truncation {trunc // 2}")


def _windowed(cells, window, stair):
    on_stair = stair.cells()
    return {k: v for k, v in cells.items() if _in_window(window, *k) or k in on_stair}


# ---------------------------------------------------------------------------
# patterns and rendering
# ---------------------------------------------------------------------------


@dataclass
class PatternMap:
    """Singular cells of an evolved grid; regular cells are elided."""

    marks: dict
    initial: frozenset
    computed: frozenset
    window: tuple
    staircase: Staircase
    params: MapParams
    direction: str
    cases: list = field(default_factory=list)
    glyphs: dict = field(default_factory=lambda: dict(DEFAULT_GLYPHS))

    @classmethod
    def from_grid(cls, grid: LatticeGrid, glyphs: dict | None = None) -> "PatternMap":
        marks = {}
        for pos, v in grid.cells.items():
            sig = classify_entry(v)
            if not sig.is_regular:
                marks[pos] = sig
        g = dict(DEFAULT_GLYPHS)
        g.update(glyphs or {})
        initial = frozenset(grid.staircase.cells())
        return cls(
            marks=marks,
            initial=initial,
            computed=frozenset(grid.cells) - initial,
            window=grid.window,
            staircase=grid.staircase,
            params=grid.params,
            direction=grid.direction,
            glyphs=g,
        )

    def kinds(self) -> dict:
        """(m, n) -> 'zero' / 'inf' for every marked cell."""
        return {pos: sig.kind for pos, sig in self.marks.items()}

    def cells_of(self, kind: str) -> set:
        return {pos for pos, sig in self.marks.items() if sig.kind == kind}

    def glyph(self, m: int, n: int) -> str:
        g = self.glyphs
        sig = self.marks.get((m, n))
        if sig is not None:
            return g["zero"] if sig.kind == ZERO_LIKE else g["inf"]
        if (m, n) in self.initial:
            return g["initial"]
        if (m, n) in self.computed:
            return g["regular"]
        return g["empty"]

    def to_ascii(self) -> str:
        m_lo, m_hi, n_lo, n_hi = self.window
        lines = []
        for m in range(m_hi, m_lo - 1, -1):
            row = "".join(self.glyph(m, n) for n in range(n_lo, n_hi + 1))
            lines.append(f"{m:>4} |{row.rstrip()}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        marks = []
        for (m, n), sig in sorted(self.marks.items()):
            order = sig.order
            marks.append(
                {
                    "m": m,
                    "n": n,
                    "class": "ZeroLike" if sig.kind == ZERO_LIKE else "InfLike",
                    "order": None if order == float("inf") else int(order),
                }
            )
        return {
            "params": {"a": qstr(self.params.a), "b": qstr(self.params.b)},
            "staircase": self.staircase.describe(),
            "anchor": list(self.staircase.anchor),
            "direction": self.direction,
            "window": list(self.window),
            "marks": marks,
            "cases": list(self.cases),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_svg(self, cell: int = 18) -> str:
        m_lo, m_hi, n_lo, n_hi = self.window
        width = (n_hi - n_lo + 2) * cell
        height = (m_hi - m_lo + 2) * cell

        def xy(m, n):
            return (n - n_lo + 1) * cell, (m_hi - m + 1) * cell

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            '<rect width="100%" height="100%" fill="white"/>',
        ]
        for m in range(m_lo, m_hi + 1):
            for n in range(n_lo, n_hi + 1):
                if (m, n) in self.computed or (m, n) in self.initial:
                    x, y = xy(m, n)
                    out.append(f'<circle cx="{x}" cy="{y}" r="1.5" fill="#999"/>')
        pts = " ".join(f"{x},{y}" for x, y in (xy(m, n) for m, n, *_ in self.staircase.positions()))
        out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="2"/>')
        for (m, n), sig in sorted(self.marks.items()):
            x, y = xy(m, n)
            label = "0" if sig.kind == ZERO_LIKE else "&#8734;"
            color = "#1f5fbf" if sig.kind == ZERO_LIKE else "#c0392b"
            out.append(
                f'<text x="{x}" y="{y + 5}" font-size="{cell - 4}" text-anchor="middle" '
                f'fill="{color}">{label}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"


def render_pattern(grid, format: str = "ascii", glyphs: dict | None = None) -> str:
    """Render a grid (or an existing PatternMap) as ascii, json or svg text."""
    pm = grid if isinstance(grid, PatternMap) else PatternMap.from_grid(grid, glyphs)
    if glyphs and isinstance(grid, PatternMap):
        pm.glyphs.update(glyphs)
    if format == "ascii":
        return pm.to_ascii()
    if format == "json":
        return pm.to_json()
    if format == "svg":
        return pm.to_svg()
    raise ValueError("format must be 'ascii', 'json' or 'svg'")


# ---------------------------------------------------------------------------
# interactions between zeros on neighbouring steps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interaction:
    upper: tuple  # (m, n) of the zero on the upper step
    lower: tuple
    label: str

    def to_dict(self) -> dict:
        return {"upper": list(self.upper), "lower": list(self.lower), "case": self.label}


def _pair_label(stair: Staircase, ja, sa, jb, sb) -> str:
    if jb != ja + 1:
        return NO_INTERACTION
    ta, tb = stair.zero_type(ja, sa), stair.zero_type(jb, sb)
    if NONSINGULAR in (ta, tb):
        return NO_INTERACTION
    if ta == OPEN and tb == OPEN:
        return CASE1 if sb == 2 else CASE2
    if ta == OPEN and tb == ANTICONFINING:
        return CASE3 if sb == 2 else CASE4
    if ta == ANTICONFINING and tb == OPEN:
        return CASE4
    return CASE5


def classify_interaction(stair: Staircase, p: MapParams | None = None) -> list[Interaction]:
    """Label every pair of zeros on distinct steps.

    A corner zero (last slot) is open, a zero in slots 2..q_j is
    anticonfining, and a slot-1 zero (below the corner of the step above)
    is never singular. Pairs on adjacent steps get Case1..Case5; all other
    pairs are NoInteraction. ``p`` is accepted for symmetry with evolve; the
    labels depend only on the geometry.
    """
    zeros = sorted(
        ((j, slot, (m, n)) for m, n, j, slot, v in stair.positions() if v == 0),
        key=lambda z: (z[0], z[1]),
    )
    seen_steps = {}
    for j, slot, pos in zeros:
        if j in seen_steps:
            raise SameStepUnsupported(
                f"zeros at {seen_steps[j]} and {pos} share step {j}; codimension exceeds 1"
            )
        seen_steps[j] = pos
    out = []
    for i, (ja, sa, pa) in enumerate(zeros):
        for jb, sb, pb in zeros[i + 1 :]:
            out.append(Interaction(pa, pb, _pair_label(stair, ja, sa, jb, sb)))
    return out


def padded_staircase(
    core_widths: Sequence[int],
    zeros: Iterable[tuple[int, int]],
    pad_above: int = 3,
    pad_below: int = 3,
    pad_width: int = 1,
    seed: int = 0,
    anchor_corner: tuple = (0, 0),
) -> Staircase:
    """Core steps with zeros, surrounded by regular padding steps.

    ``zeros`` index the core steps. The staircase is placed so that the
    corner (last slot) of the first core step sits at ``anchor_corner``.
    """
    widths = [pad_width] * pad_above + list(core_widths) + [pad_width] * pad_below
    shifted = [(j + pad_above, slot) for j, slot in zeros]
    m_c, n_c = anchor_corner
    m0 = m_c + pad_above
    n0 = n_c - core_widths[0] - pad_width * pad_above
    return Staircase.from_widths(widths, shifted, seed=seed, anchor=(m0, n0))


def case_scenario(label: str, seed: int = 0, pad: int = 6) -> Staircase:
    """Canonical staircase for each interaction case (upper corner at (0, 0))."""
    if label == CASE1:
        core, zeros = [2, 1], [(0, 3), (1, 2)]
    elif label == CASE2:
        core, zeros = [2, 2], [(0, 3), (1, 3)]
    elif label == CASE3:
        core, zeros = [2, 3], [(0, 3), (1, 2)]
    elif label == CASE4:
        core, zeros = [2, 3], [(0, 3), (1, 3)]
    elif label == CASE5:
        core, zeros = [3, 3], [(0, 2), (1, 2)]
    else:
        raise ValueError(f"unknown case {label!r}")
    return padded_staircase(core, zeros, pad, pad, 1, seed)
