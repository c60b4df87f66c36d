"""Arrow-field CSP on the n x n square: rotation calculus and adversary.

Cells hold one of 8 compass directions (octants, 45 degrees apart,
clockwise from RIGHT).  Adjacent cells must differ by at most 45 degrees
and boundary cells must not point outside the square; the resulting CSP
is unsatisfiable, which a discrete winding-number argument makes
constructive: a closed path's total rotation is a multiple of 360, a
valid boundary ring winds exactly +360, and any rectangle with nonzero
boundary winding contains a conflicting adjacent pair.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .csp import Csp, Nogood

# octants, clockwise from RIGHT
RIGHT, DOWN_RIGHT, DOWN, DOWN_LEFT, LEFT, UP_LEFT, UP, UP_RIGHT = range(8)
OCTANT_GLYPHS = "→↘↓↙←↖↑↗"  # →↘↓↙←↖↑↗
DIR_VECTORS = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)]

Cell = tuple[int, int]  # (col, row), (0, 0) at bottom-left


class ArrowsError(Exception):
    pass


class UnassignedCell(ArrowsError):
    pass


class NoConflict(ArrowsError):
    """The divide-and-conquer ran out of area: oracle is not valid."""


class NoPatternFound(ArrowsError):
    pass


class TerminalGame(ArrowsError):
    pass


class IllegalChoice(ArrowsError):
    pass


def opposite(d: int) -> int:
    return (d + 4) % 8


def rotation(a: int, b: int) -> int:
    """Minimal signed clockwise rotation from a to b; 180-degree ties are +180."""
    diff = (b - a) % 8
    return 45 * diff if diff <= 4 else 45 * (diff - 8)


def path_rotation(dirs: Sequence[int], closed: bool = False) -> int:
    total = sum(rotation(a, b) for a, b in zip(dirs, dirs[1:]))
    if closed and dirs:
        total += rotation(dirs[-1], dirs[0])
    return total


@dataclass
class ArrowGrid:
    """Partial map from cells to octants on an n x n board."""

    n: int
    cells: dict[Cell, int] = field(default_factory=dict)

    def get(self, cell: Cell) -> Optional[int]:
        return self.cells.get(cell)

    def set(self, cell: Cell, d: int) -> None:
        col, row = cell
        if not (0 <= col < self.n and 0 <= row < self.n):
            raise ArrowsError(f"cell {cell} outside the board")
        self.cells[cell] = d

    def is_full(self) -> bool:
        return len(self.cells) == self.n * self.n


# ---------------------------------------------------------------------------
# boundary constraint sets


def weak_forbidden(cell: Cell, n: int) -> set[int]:
    """Directions with an outward component at this boundary position."""
    col, row = cell
    out: set[int] = set()
    for d, (dx, dy) in enumerate(DIR_VECTORS):
        if (
            (row == 0 and dy < 0)
            or (row == n - 1 and dy > 0)
            or (col == 0 and dx < 0)
            or (col == n - 1 and dx > 0)
        ):
            out.add(d)
    return out


def strict_allowed(cell: Cell, n: int) -> set[int]:
    """Directions with a strictly inward normal component on each touched side."""
    col, row = cell
    allowed = set(range(8))
    if row == 0:
        allowed &= {UP_RIGHT, UP, UP_LEFT}
    if row == n - 1:
        allowed &= {DOWN_RIGHT, DOWN, DOWN_LEFT}
    if col == 0:
        allowed &= {DOWN_RIGHT, RIGHT, UP_RIGHT}
    if col == n - 1:
        allowed &= {DOWN_LEFT, LEFT, UP_LEFT}
    return allowed


def strict_forbidden(cell: Cell, n: int) -> set[int]:
    return set(range(8)) - strict_allowed(cell, n)


def boundary_ok(cell: Cell, d: int, n: int, mode: str = "weak") -> bool:
    if mode == "weak":
        return d not in weak_forbidden(cell, n)
    if mode == "strict":
        return d in strict_allowed(cell, n)
    raise ArrowsError(f"unknown boundary mode {mode!r}")


# ---------------------------------------------------------------------------
# psi generator


def cell_id(cell: Cell, n: int) -> int:
    col, row = cell
    return row * n + col


def id_cell(var: int, n: int) -> Cell:
    return (var % n, var // n)


CONFLICT_PAIRS = [
    (a, b) for a in range(8) for b in range(8) if abs(rotation(a, b)) > 45
]


def generate_psi(n: int, boundary_mode: str = "weak") -> tuple[Csp, dict]:
    """CSP over n*n cells, k=8: 45-degree adjacency plus boundary nogoods."""
    if n < 2:
        raise ArrowsError("n must be at least 2")
    nogoods: list[Nogood] = []
    for row in range(n):
        for col in range(n):
            cell = (col, row)
            if col in (0, n - 1) or row in (0, n - 1):
                if boundary_mode == "weak":
                    forbidden = weak_forbidden(cell, n)
                else:
                    forbidden = strict_forbidden(cell, n)
                v = cell_id(cell, n)
                nogoods.extend(Nogood.of([(v, d)]) for d in sorted(forbidden))
    for row in range(n):
        for col in range(n):
            a = cell_id((col, row), n)
            for nb in ((col + 1, row), (col, row + 1)):
                if nb[0] < n and nb[1] < n:
                    b = cell_id(nb, n)
                    for d1, d2 in CONFLICT_PAIRS:
                        nogoods.append(Nogood.of([(a, d1), (b, d2)]))
    names = [f"c{col},{row}" for row in range(n) for col in range(n)]
    csp = Csp(n * n, 8, nogoods, var_names=names)
    index_map = {
        "n": n,
        "k": 8,
        "glyphs": list(OCTANT_GLYPHS),
        "vars": [
            {"id": cell_id((col, row), n), "col": col, "row": row}
            for row in range(n)
            for col in range(n)
        ],
    }
    return csp, index_map


class PsiConstraints:
    """Implicit constraint view of psi_n for game play at large n."""

    def __init__(self, n: int, boundary_mode: str = "weak"):
        self.n = n
        self.k = 8
        self.num_vars = n * n
        self.boundary_mode = boundary_mode

    def coords(self, var: int) -> Cell:
        return id_cell(var, self.n)

    def falsified_by(self, values: dict[int, int], changed: Iterable[int]):
        """Literals of some falsified nogood involving a changed variable."""
        n = self.n
        for var in changed:
            if var not in values:
                continue
            cell = id_cell(var, n)
            d = values[var]
            if not boundary_ok(cell, d, n, self.boundary_mode):
                return ((var, d),)
            col, row = cell
            for nb in ((col + 1, row), (col - 1, row), (col, row + 1), (col, row - 1)):
                if 0 <= nb[0] < n and 0 <= nb[1] < n:
                    w = cell_id(nb, n)
                    if w in values and abs(rotation(d, values[w])) > 45:
                        return tuple(sorted([(var, d), (w, values[w])]))
        return None


# ---------------------------------------------------------------------------
# conflict scans and winding numbers


def scan_all_conflicts(grid: ArrowGrid) -> list[tuple[Cell, Cell]]:
    """Every edge-adjacent pair differing by more than 45 degrees, row-major."""
    if not grid.is_full():
        raise UnassignedCell("scan requires a fully assigned grid")
    out = []
    n = grid.n
    g = grid.cells
    for row in range(n):
        for col in range(n):
            d = g[(col, row)]
            if col + 1 < n and abs(rotation(d, g[(col + 1, row)])) > 45:
                out.append(((col, row), (col + 1, row)))
            if row + 1 < n and abs(rotation(d, g[(col, row + 1)])) > 45:
                out.append(((col, row), (col, row + 1)))
    return out


def rect_ring(rect: tuple[int, int, int, int]) -> list[Cell]:
    """Boundary cells of rect (col0, row0, col1, row1), clockwise from bottom-left.

    Clockwise with y pointing up: up the left side, right along the top,
    down the right side, back left along the bottom.  Degenerate (width
    or height 1) rectangles traverse there and back.
    """
    c0, r0, c1, r1 = rect
    if c0 > c1 or r0 > r1:
        raise ArrowsError(f"bad rect {rect}")
    if c0 == c1 and r0 == r1:
        return [(c0, r0)]
    if c0 == c1:
        return [(c0, r) for r in range(r0, r1 + 1)] + [
            (c0, r) for r in range(r1 - 1, r0, -1)
        ]
    if r0 == r1:
        return [(c, r0) for c in range(c0, c1 + 1)] + [
            (c, r0) for c in range(c1 - 1, c0, -1)
        ]
    left = [(c0, r) for r in range(r0, r1 + 1)]
    top = [(c, r1) for c in range(c0 + 1, c1 + 1)]
    right = [(c1, r) for r in range(r1 - 1, r0 - 1, -1)]
    bottom = [(c, r0) for c in range(c1 - 1, c0, -1)]
    return left + top + right + bottom


def rect_boundary_rotation(grid, rect: tuple[int, int, int, int]) -> int:
    """Total clockwise rotation along the rectangle's boundary cells."""
    lookup = grid.cells.get if isinstance(grid, ArrowGrid) else grid
    dirs = []
    for cell in rect_ring(rect):
        d = lookup(cell)
        if d is None:
            raise UnassignedCell(f"cell {cell} unassigned")
        dirs.append(d)
    return path_rotation(dirs, closed=True)


@dataclass(frozen=True)
class Conflict:
    """A witnessed violation: either an adjacent pair or a boundary cell."""

    kind: str  # "pair" | "boundary"
    cells: tuple[Cell, ...]
    dirs: tuple[int, ...]
    constraint: Optional[str] = None


class _OracleView:
    """Memoizing, counting wrapper over a direction oracle.

    Every newly queried cell is checked against the boundary constraint
    and against already-known neighbours, so any violation is witnessed
    the moment the search touches it.
    """

    def __init__(self, oracle: Callable[[Cell], int], n: int, boundary_mode: str):
        self.oracle = oracle
        self.n = n
        self.mode = boundary_mode
        self.known: dict[Cell, int] = {}
        self.queries = 0
        self.violation: Optional[Conflict] = None

    def get(self, cell: Cell) -> int:
        d = self.known.get(cell)
        if d is None:
            d = self.oracle(cell)
            if not isinstance(d, int) or not (0 <= d <= 7):
                raise ArrowsError(f"oracle returned non-octant {d!r}")
            self.known[cell] = d
            self.queries += 1
            col, row = cell
            if (
                self.violation is None
                and (col in (0, self.n - 1) or row in (0, self.n - 1))
                and not boundary_ok(cell, d, self.n, self.mode)
            ):
                self.violation = Conflict("boundary", (cell,), (d,), self.mode)
            if self.violation is None:
                for nb in ((col + 1, row), (col - 1, row), (col, row + 1), (col, row - 1)):
                    e = self.known.get(nb)
                    if e is not None and abs(rotation(d, e)) > 45:
                        self.violation = Conflict("pair", (cell, nb), (d, e))
                        break
        return d


def find_conflict_dnc(
    oracle: Callable[[Cell], int],
    n: int,
    boundary_mode: str = "weak",
    eager_boundary: bool = False,
) -> tuple[Conflict, int]:
    """Locate a conflicting adjacent pair with O(n) oracle queries.

    A valid boundary winds exactly +360, so bisection on rectangle
    windings homes in on a conflict; boundary arcs are queried lazily as
    sub-rectangle rings need them, and any invalid boundary cell is
    returned the moment it is touched.  ``eager_boundary`` instead scans
    the full outer ring up front before recursing.
    """
    view = _OracleView(oracle, n, boundary_mode)

    def ring_rotation(rect) -> int:
        dirs = [view.get(c) for c in rect_ring(rect)]
        return path_rotation(dirs, closed=True)

    def unknown_in_ring(rect) -> int:
        return sum(1 for c in rect_ring(rect) if c not in view.known)

    def solve(rect, s_rect: int) -> Conflict:
        c0, r0, c1, r1 = rect
        w, h = c1 - c0 + 1, r1 - r0 + 1
        if view.violation:
            return view.violation
        if w <= 2 or h <= 2 or w * h <= 16:
            for row in range(r0, r1 + 1):
                for col in range(c0, c1 + 1):
                    view.get((col, row))
                    if view.violation:
                        return view.violation
            raise NoConflict(f"no conflict in exhausted rect {rect}")
        if h >= w:
            mid = (r0 + r1) // 2
            halves = ((c0, r0, c1, mid), (c0, mid, c1, r1))  # share row mid
            axis = 1
        else:
            mid = (c0 + c1) // 2
            halves = ((c0, r0, mid, r1), (mid, r0, c1, r1))
            axis = 0
        # Heuristic evaluation order: arrows of a valid field converge on
        # conflicts, so probe the centre and look where it points; fall
        # back to whichever half's ring costs fewer fresh queries.  Only
        # the order is heuristic; the winding certificate still decides.
        first, second = halves
        centre = ((c0 + c1) // 2, (r0 + r1) // 2)
        component = DIR_VECTORS[view.get(centre)][axis]
        if component > 0:
            first, second = second, first
        elif component == 0 and unknown_in_ring(second) < unknown_in_ring(first):
            first, second = second, first
        if view.violation:
            return view.violation
        s_first = ring_rotation(first)
        if view.violation:
            return view.violation
        if s_first != 0:
            return solve(first, s_first)
        return solve(second, s_rect - s_first)

    rect = (0, 0, n - 1, n - 1)
    if eager_boundary:
        for cell in rect_ring(rect):
            view.get(cell)
        if view.violation:
            return view.violation, view.queries
        s = ring_rotation(rect)
        if s == 0:
            raise NoConflict("valid boundary ring with zero winding")
        return solve(rect, s), view.queries
    # lazy mode leans on the theorem: a fully valid boundary winds +360
    return solve(rect, 360), view.queries


def planted_conflict_oracle(n: int, seed: int) -> tuple[Callable[[Cell], int], Cell]:
    """Weak-valid full-grid oracle whose only conflicts ring a planted sink.

    Every cell points at a fixed interior attractor; quantization keeps
    neighbouring cells within 45 degrees except right around the sink.
    """
    rng = random.Random(seed)
    if n > 4:
        cx = rng.randrange(2, n - 2) + 0.5
        cy = rng.randrange(2, n - 2) + 0.5
    else:
        cx = cy = n / 2.0 + 0.25
    step = math.pi / 4

    def oracle(cell: Cell) -> int:
        col, row = cell
        phi = math.atan2(cy - row, cx - col)  # math angle of the inward vector
        return round(-phi / step) % 8

    return oracle, (int(cx), int(cy))


# ---------------------------------------------------------------------------
# raster serialization (one octant digit per cell, first line = bottom row)


def grid_to_raster(grid: ArrowGrid) -> str:
    if not grid.is_full():
        raise UnassignedCell("raster requires a full grid")
    lines = []
    for row in range(grid.n):
        lines.append("".join(str(grid.cells[(col, row)]) for col in range(grid.n)))
    return "\n".join(lines) + "\n"


def raster_to_grid(text: str) -> ArrowGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = len(lines)
    grid = ArrowGrid(n)
    for row, line in enumerate(lines):
        if len(line) != n:
            raise ArrowsError(f"raster line {row} has length {len(line)}, expected {n}")
        for col, ch in enumerate(line):
            if ch not in "01234567":
                raise ArrowsError(f"bad octant digit {ch!r}")
            grid.cells[(col, row)] = int(ch)
    return grid


# ---------------------------------------------------------------------------
# constrained region fill (slot channels, buffer patterns, grid gadgets)


def solve_arrow_region(
    cells: Iterable[Cell],
    context: dict[Cell, int],
    board: tuple[int, int],
    prefer: Callable[[Cell], Sequence[int]],
    boundary_mode: str = "weak",
    differ_from: Optional[dict[Cell, int]] = None,
    node_cap: int = 500_000,
) -> dict[Cell, int]:
    """Backtracking fill of `cells` consistent with `context` and each other.

    Consistency: boundary legality on a (w, h) board plus the 45-degree
    rule against every assigned 4-neighbour.  Candidate values follow
    `prefer` order; `differ_from` forbids one value per cell.  Cells are
    filled in sorted order (column-major), which matches the west-to-east
    propagation of every region this module builds, so a well-chosen
    preference assigns almost every cell on the first try.  Raises
    NoPatternFound when the region admits no fill within the budget.
    """
    w, h = board
    order = sorted(dict.fromkeys(cells))
    if not order:
        return {}
    value: dict[Cell, int] = {}

    def candidates(cell: Cell) -> list[int]:
        col, row = cell
        forbid = differ_from.get(cell) if differ_from else None
        out = []
        for d in prefer(cell):
            if d == forbid or not _board_ok(cell, d, w, h, boundary_mode):
                continue
            ok = True
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nb = (col + dx, row + dy)
                e = value.get(nb)
                if e is None:
                    e = context.get(nb)
                if e is not None and abs(rotation(d, e)) > 45:
                    ok = False
                    break
            if ok:
                out.append(d)
        return out

    nodes = 0
    stack: list[list[int]] = [candidates(order[0])]
    while stack:
        k = len(stack) - 1
        opts = stack[-1]
        if not opts:
            stack.pop()
            value.pop(order[k], None)
            continue
        nodes += 1
        if nodes > node_cap:
            raise NoPatternFound("region fill exceeded the search budget")
        value[order[k]] = opts.pop(0)
        if k + 1 == len(order):
            return dict(value)
        stack.append(candidates(order[k + 1]))
    raise NoPatternFound(f"no consistent fill for {len(order)} cells")


def _board_ok(cell: Cell, d: int, w: int, h: int, mode: str) -> bool:
    if mode == "none":
        return True
    col, row = cell
    dx, dy = DIR_VECTORS[d]
    if mode == "weak":
        if row == 0 and dy < 0:
            return False
        if row == h - 1 and dy > 0:
            return False
        if col == 0 and dx < 0:
            return False
        if col == w - 1 and dx > 0:
            return False
        return True
    if row == 0 and d not in (UP_RIGHT, UP, UP_LEFT):
        return False
    if row == h - 1 and d not in (DOWN_RIGHT, DOWN, DOWN_LEFT):
        return False
    if col == 0 and d not in (DOWN_RIGHT, RIGHT, UP_RIGHT):
        return False
    if col == w - 1 and d not in (DOWN_LEFT, LEFT, UP_LEFT):
        return False
    return True


# ---------------------------------------------------------------------------
# the adversary of the buffer game

ARROWS_MIN_N = 64

_UP_SHELL = [RIGHT, UP_RIGHT, UP, UP_LEFT, LEFT]
_DOWN_SHELL = [RIGHT, DOWN_RIGHT, DOWN, DOWN_LEFT, LEFT]


@dataclass
class BobArrowsState:
    """Adversary state: a leftward-marching buffer hides the contradiction.

    The board splits into 8-column slots; the buffer is the left half of
    its slot, everything east of it is filled (the column facing the
    buffer all LEFT), everything west is empty except small islands from
    earlier answers.  Relocations claim the rightmost empty slot to the
    west and flood the skipped channel with LEFT arrows, wrapping islands
    in 45-degree shells.
    """

    n: int
    grid: dict[Cell, int] = field(default_factory=dict)
    buffer_col0: int = 0
    conceded: bool = False
    choose_any_count: int = 0
    choose_any_cells: list[Cell] = field(default_factory=list)
    pending: Optional[dict] = None
    last_move_fills: list[Cell] = field(default_factory=list)

    @property
    def slots(self) -> int:
        return self.n // 8

    def slot_of(self, col: int) -> int:
        return col // 8

    def buffer_cells(self) -> list[Cell]:
        return [
            (c, r)
            for c in range(self.buffer_col0, self.buffer_col0 + 4)
            for r in range(self.n)
        ]

    def slot_empty(self, s: int) -> bool:
        return all(
            (c, r) not in self.grid
            for c in range(8 * s, 8 * s + 8)
            for r in range(self.n)
        )

    def board_view(self) -> dict[int, int]:
        return {cell_id(c, self.n): d for c, d in self.grid.items()}


def bob_arrows_new(n: int) -> BobArrowsState:
    if n // 8 < 2:
        raise ArrowsError("adversary needs at least two 8-column slots")
    state = BobArrowsState(n=n)
    s = state.slots - 1
    state.buffer_col0 = 8 * s
    for c in range(8 * s + 4, n):
        for r in range(n):
            state.grid[(c, r)] = LEFT
            state.last_move_fills.append((c, r))
    return state


def _case1_options(state: BobArrowsState, cell: Cell) -> tuple[int, int]:
    if cell[1] == state.n - 1:
        return (RIGHT, DOWN_RIGHT)
    return (RIGHT, UP_RIGHT)


def _fill_right_blob(state: BobArrowsState, cell: Cell, val: int) -> None:
    """The chosen value plus RIGHT arrows into the empty neighbours."""
    state.grid[cell] = val
    state.last_move_fills.append(cell)
    col, row = cell
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = (col + dx, row + dy)
        if 0 <= nb[0] < state.n and 0 <= nb[1] < state.n and nb not in state.grid:
            state.grid[nb] = RIGHT
            state.last_move_fills.append(nb)


def _channel_prefer(state: BobArrowsState, islands: list[Cell]):
    """Preference: LEFT, shaded by 45-degree shells around island cells.

    Shell direction (over the top or under the bottom of the octant
    circle) follows the nearest island so each island gets one coherent
    shell; islands in the upper half rotate through the DOWN octants to
    stay legal near the top boundary, and vice versa.
    """
    n = state.n

    def prefer(cell: Cell) -> list[int]:
        col, row = cell
        first = LEFT
        if islands:
            dist, iy = min(
                (max(abs(col - ic), abs(row - ir)), ir) for ic, ir in islands
            )
            if dist < 4:
                shell = _DOWN_SHELL if iy >= n // 2 else _UP_SHELL
                first = shell[dist]
        rest = sorted(set(range(8)) - {first}, key=lambda e: abs(rotation(first, e)))
        return [first] + rest

    return prefer


def _find_empty_strip(state: BobArrowsState, m_cols, around_row: Optional[int]):
    """An empty 8-row strip across the M columns, clear of both boundaries."""
    n = state.n

    def strip_empty(h0: int) -> bool:
        return all(
            (c, r) not in state.grid for r in range(h0, h0 + 8) for c in m_cols
        )

    if around_row is None:
        for h0 in range(1, n - 8):
            if strip_empty(h0):
                return h0
        return None
    for h0 in range(max(1, around_row - 7), min(n - 9, around_row) + 1):
        if strip_empty(h0):
            return h0
    return None


def _relocate(state: BobArrowsState, target_slot: int) -> Optional[dict[Cell, int]]:
    """Flood-fill the channel between the claimed slot and the old buffer.

    Returns the fill applied (None on failure).  The new wall column is
    pinned to LEFT; islands left behind by earlier answers are wrapped in
    shells.  The old buffer becomes part of the channel, so this applies
    pattern 1; callers wanting a pattern choice must carve it out first.
    """
    n = state.n
    old_b0 = state.buffer_col0
    wall = 8 * target_slot + 4
    region = [
        (c, r) for c in range(wall, old_b0 + 4) for r in range(n) if (c, r) not in state.grid
    ]
    context = dict()
    for r in range(n):
        context[(old_b0 + 4, r)] = LEFT  # the old wall
    for (c, r), d in state.grid.items():
        if wall - 1 <= c <= old_b0 + 4:
            context[(c, r)] = d
    islands = [
        (c, r)
        for (c, r), d in state.grid.items()
        if wall <= c < old_b0 + 4
    ]
    prefer = _channel_prefer(state, islands)

    def prefer_wall(cell: Cell):
        if cell[0] == wall:
            return [LEFT]
        return prefer(cell)

    try:
        fill = solve_arrow_region(region, context, (n, n), prefer_wall)
    except NoPatternFound:
        return None
    for cell, d in fill.items():
        state.grid[cell] = d
        state.last_move_fills.append(cell)
    state.buffer_col0 = 8 * target_slot
    return fill


def build_buffer_patterns(
    state_or_grid, n: int, b0: int, h0: int
) -> tuple[dict[Cell, int], dict[Cell, int]]:
    """Two fills of the old buffer columns b0..b0+3 given surrounding fills.

    Pattern 1 is the channel flood (LEFT away from islands); pattern 2
    equals pattern 1 outside rows h0..h0+7 and differs on every cell of
    that strip, preferring the 45-degree-rotated UP_LEFT block.  Both are
    verified conflict-free against the surroundings by construction.
    """
    grid = state_or_grid.grid if isinstance(state_or_grid, BobArrowsState) else state_or_grid
    context = {}
    for c in range(b0 - 1, b0 + 5):
        for r in range(n):
            if (c, r) in grid:
                context[(c, r)] = grid[(c, r)]
    p1_cells = [(c, r) for c in range(b0, b0 + 4) for r in range(n) if (c, r) not in grid]

    def prefer_left(cell: Cell) -> list[int]:
        return [LEFT] + sorted(set(range(8)) - {LEFT}, key=lambda e: abs(rotation(LEFT, e)))

    p1 = solve_arrow_region(p1_cells, context, (n, n), prefer_left)
    strip = [(c, r) for c in range(b0, b0 + 4) for r in range(h0, h0 + 8)]
    ctx2 = dict(context)
    for cell, d in p1.items():
        if cell not in strip:
            ctx2[cell] = d
    missing = [c for c in strip if c in grid]
    if missing:
        raise NoPatternFound(f"strip cells already assigned: {missing[:3]}")

    def prefer_upleft(cell: Cell) -> list[int]:
        return [UP_LEFT] + sorted(
            set(range(8)) - {UP_LEFT}, key=lambda e: abs(rotation(UP_LEFT, e))
        )

    alt = solve_arrow_region(
        strip, ctx2, (n, n), prefer_upleft, differ_from={c: p1[c] for c in strip}
    )
    p2 = dict(p1)
    p2.update(alt)
    return p1, p2


def bob_arrows_answer(state: BobArrowsState, cell: Cell):
    """Answer a query: ('fixed', v) | ('choose', options) | ('conceded', None)."""
    if state.conceded:
        raise TerminalGame("bob already conceded")
    if state.pending is not None:
        raise TerminalGame("awaiting a choice")
    col, row = cell
    if not (0 <= col < state.n and 0 <= row < state.n):
        raise ArrowsError(f"cell {cell} off the board")
    state.last_move_fills = []
    val = state.grid.get(cell)
    if val is not None:
        return ("fixed", val)
    b0 = state.buffer_col0
    if col < b0 - 1:
        options = _case1_options(state, cell)
        state.pending = {"case": 1, "cell": cell, "options": options}
        return ("choose", options)
    if col == b0 - 1:
        options = _case1_options(state, cell)
        state.pending = {"case": 3, "cell": cell, "options": options}
        return ("choose", options)
    # case 2: the queried cell is inside the buffer
    target = None
    for s in range(state.slot_of(b0) - 1, -1, -1):
        if state.slot_empty(s):
            target = s
            break
    if target is None:
        state.conceded = True
        return ("conceded", None)
    m_cols = range(8 * target + 8, b0)
    h0 = _find_empty_strip(state, m_cols, around_row=row)
    if h0 is None:
        # boundary-row queries can never sit inside an interior strip;
        # any strip still works, with the offer built at the cell itself
        h0 = _find_empty_strip(state, m_cols, around_row=None)
    if h0 is None:
        state.conceded = True
        return ("conceded", None)
    old_b0 = b0
    # fill the channel up to, but excluding, the old buffer columns
    saved_cols = set(range(old_b0, old_b0 + 4))
    wall = 8 * target + 4
    region = [
        (c, r)
        for c in range(wall, old_b0)
        for r in range(state.n)
        if (c, r) not in state.grid
    ]
    context = {}
    for (c, r), d in state.grid.items():
        if wall - 1 <= c <= old_b0 + 4:
            context[(c, r)] = d
    islands = [(c, r) for (c, r), d in state.grid.items() if wall <= c < old_b0]
    prefer = _channel_prefer(state, islands)

    def prefer_wall(cc: Cell):
        if cc[0] == wall:
            return [LEFT]
        return prefer(cc)

    try:
        fill = solve_arrow_region(region, context, (state.n, state.n), prefer_wall)
    except NoPatternFound:
        state.conceded = True
        return ("conceded", None)
    for cc, d in fill.items():
        state.grid[cc] = d
        state.last_move_fills.append(cc)
    state.buffer_col0 = 8 * target
    try:
        p1, p2 = build_buffer_patterns(state, state.n, old_b0, h0)
    except NoPatternFound:
        state.conceded = True
        return ("conceded", None)
    if p1[cell] != p2[cell]:
        options = (p1[cell], p2[cell])
    else:
        alt = _alternative_at(state, p1, cell)
        if alt is None:
            state.conceded = True
            return ("conceded", None)
        options = (p1[cell], alt)
    state.pending = {
        "case": 2,
        "cell": cell,
        "options": options,
        "p1": p1,
        "p2": p2,
    }
    return ("choose", options)


def _alternative_at(state: BobArrowsState, fill: dict[Cell, int], cell: Cell):
    """A second legal value at `cell`, compatible with the fill around it."""
    col, row = cell
    base = fill[cell]
    for d in sorted(range(8), key=lambda e: abs(rotation(base, e))):
        if d == base or not boundary_ok(cell, d, state.n, "weak"):
            continue
        ok = True
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (col + dx, row + dy)
            e = state.grid.get(nb)
            if e is None:
                e = fill.get(nb)
            if e is not None and abs(rotation(d, e)) > 45:
                ok = False
                break
        if ok:
            return d
    return None


def bob_arrows_on_choice(state: BobArrowsState, value: int) -> None:
    if state.pending is None:
        raise TerminalGame("no pending choice")
    pending = state.pending
    cell = pending["cell"]
    if value not in pending["options"]:
        raise IllegalChoice(f"{value} not in offered {pending['options']}")
    case = pending["case"]
    state.pending = None
    state.choose_any_count += 1
    state.choose_any_cells.append(cell)
    if case == 1:
        _fill_right_blob(state, cell, value)
        return
    if case == 3:
        # the blob first: the eastern neighbour lies in the buffer and is
        # covered by the relocation fill instead
        state.grid[cell] = value
        state.last_move_fills.append(cell)
        col, row = cell
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (col + dx, row + dy)
            if (
                0 <= nb[0] < state.n
                and 0 <= nb[1] < state.n
                and nb[0] < state.buffer_col0
                and nb not in state.grid
            ):
                state.grid[nb] = RIGHT
                state.last_move_fills.append(nb)
        target = None
        for s in range(state.slot_of(state.buffer_col0) - 1, -1, -1):
            if state.slot_empty(s):
                target = s
                break
        if target is None:
            state.conceded = True
            return
        if _relocate(state, target) is None:
            state.conceded = True
        return
    # case 2: channel already filled at answer time; apply the chosen
    # pattern (an off-pattern alternative at the cell itself rides on
    # pattern 1, which it was validated against)
    p1, p2 = pending["p1"], pending["p2"]
    chosen = p2 if value == p2[cell] and p2[cell] != p1[cell] else p1
    state.grid[cell] = value
    state.last_move_fills.append(cell)
    for cc, d in chosen.items():
        if cc not in state.grid:
            state.grid[cc] = d
            state.last_move_fills.append(cc)


def check_arrows_invariants_incremental(
    state: BobArrowsState, new_cells: Sequence[Cell], prev_b0: int
) -> list[str]:
    """Per-move-complete invariant check at O(buffer + delta) cost.

    Assignments are monotone, so the adjacency invariant (3) and the
    no-falsified invariant (5) can only break at freshly filled cells,
    and the filled-right-area invariant (2) only needs the wall column
    plus whatever channel the buffer crossed since the last check.
    Equivalent to the exhaustive check when run after every move.
    """
    n = state.n
    bad: list[str] = []
    b0 = state.buffer_col0
    wall_col = b0 + 4
    if any(cell in state.grid for cell in state.buffer_cells()):
        bad.append("1")
    ok2 = all(state.grid.get((wall_col, r)) == LEFT for r in range(n))
    if ok2 and b0 != prev_b0:
        ok2 = all(
            (c, r) in state.grid
            for c in range(wall_col, min(prev_b0 + 4, n))
            for r in range(n)
        )
    if not ok2:
        bad.append("2")
    ok3 = True
    ok5 = True
    for col, row in new_cells:
        d = state.grid.get((col, row))
        if d is None:
            continue
        if not boundary_ok((col, row), d, n, "weak"):
            ok5 = False
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (col + dx, row + dy)
            if not (0 <= nb[0] < n and 0 <= nb[1] < n):
                continue
            e = state.grid.get(nb)
            if e is None:
                if d != RIGHT and col != wall_col:
                    ok3 = False
            elif abs(rotation(d, e)) > 45:
                ok5 = False
    if not ok3:
        bad.append("3")
    k_slots = state.slots - state.slot_of(b0) - 1
    right_choices = sum(1 for c in state.choose_any_cells if c[0] > b0 + 3)
    if 2 * right_choices < k_slots:
        bad.append("4")
    if not ok5:
        bad.append("5")
    return bad


def check_arrows_invariants(state: BobArrowsState) -> list[str]:
    """Violated invariant ids among '1'..'5' (empty when all hold)."""
    n = state.n
    bad: list[str] = []
    b0 = state.buffer_col0
    wall_col = b0 + 4
    if any(cell in state.grid for cell in state.buffer_cells()):
        bad.append("1")
    right_full = all(
        (c, r) in state.grid for c in range(wall_col, n) for r in range(n)
    )
    wall_left = all(state.grid.get((wall_col, r)) == LEFT for r in range(n))
    if not (right_full and wall_left):
        bad.append("2")
    ok3 = True
    for (col, row), d in state.grid.items():
        if col == wall_col or d == RIGHT:
            continue
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (col + dx, row + dy)
            if 0 <= nb[0] < n and 0 <= nb[1] < n and nb not in state.grid:
                ok3 = False
                break
        if not ok3:
            break
    if not ok3:
        bad.append("3")
    k_slots = state.slots - state.slot_of(b0) - 1
    right_choices = sum(1 for c in state.choose_any_cells if c[0] > b0 + 3)
    if 2 * right_choices < k_slots:
        bad.append("4")
    ok5 = True
    for (col, row), d in state.grid.items():
        if not boundary_ok((col, row), d, n, "weak"):
            ok5 = False
            break
        for nb in ((col + 1, row), (col, row + 1)):
            e = state.grid.get(nb)
            if e is not None and abs(rotation(d, e)) > 45:
                ok5 = False
                break
        if not ok5:
            break
    if not ok5:
        bad.append("5")
    return bad
