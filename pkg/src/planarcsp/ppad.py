"""Grid search problems and the reductions between them.

Three total problems on the 2^k grid: find a >45-degree adjacent arrow
pair in a valid arrow field (ARROWS), find a trichromatic 2x2 square in
a valid 3-coloring (2D-BROUWER), and find a directed leaf other than the
origin in a planar pairing digraph (RLEAFD).  Arrow fields reduce to
colorings by grouping the eight directions into three arcs and wrapping
the instance in a transition collar; pairing digraphs reduce to arrow
fields by compiling each node into a 9x9 block whose corridors carry a
full 360-degree winding, so corridor dead ends (directed leaves) are
exactly the conflict sites.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable

from .arrows import (
    ArrowGrid,
    Cell,
    DOWN,
    DOWN_LEFT,
    DOWN_RIGHT,
    LEFT,
    RIGHT,
    UP,
    UP_LEFT,
    UP_RIGHT,
    rotation,
    solve_arrow_region,
    strict_allowed,
)


class PpadError(Exception):
    pass


class InvalidInstance(PpadError):
    pass


class NotALeaf(PpadError):
    pass


class NoneFound(PpadError):
    pass


# octant -> group: {DOWN, DOWN_LEFT, LEFT} = 0, {RIGHT, DOWN_RIGHT} = 1,
# {UP_RIGHT, UP, UP_LEFT} = 2
ARROW_GROUP = [1, 1, 0, 0, 0, 2, 2, 2]


def arrow_group(d: int) -> int:
    return ARROW_GROUP[d]


def next_pow2(x: int) -> int:
    n = 1
    while n < x:
        n *= 2
    return n


# ---------------------------------------------------------------------------
# oracles


@dataclass
class ArrowOracle:
    """Total arrow assignment on B_n, strict-valid on the boundary."""

    n: int
    fn: Callable[[Cell], int]

    def __call__(self, p: Cell) -> int:
        return self.fn(p)

    def boundary_valid(self) -> bool:
        n = self.n
        for i in range(n):
            for p in ((i, 0), (i, n - 1), (0, i), (n - 1, i)):
                if self.fn(p) not in strict_allowed(p, n):
                    return False
        return True


@dataclass
class ColoringOracle:
    """Total 3-coloring of B_n with the fixed boundary color scheme."""

    n: int
    fn: Callable[[Cell], int]

    def __call__(self, p: Cell) -> int:
        return self.fn(p)

    def boundary_valid(self) -> bool:
        n = self.n
        for i in range(n):
            for p in ((i, 0), (i, n - 1), (0, i), (n - 1, i)):
                g = self.fn(p)
                p1, p2 = p
                if p2 == 0:
                    want = 2
                elif p1 == 0:
                    want = 0
                else:
                    want = 1
                if g != want:
                    return False
        return True


# ---------------------------------------------------------------------------
# arrows -> 2D-BROUWER


def reduce_arrows_to_brouwer(oracle: ArrowOracle) -> ColoringOracle:
    """Wrap a valid arrow field into a valid 3-coloring.

    The instance is embedded mirrored (rows flipped), which aligns its
    boundary-label winding with the orientation the coloring's fixed
    boundary demands; a transition collar (a zero row, a one column on
    the left, a two column on the right) then splices the two without
    creating any trichromatic square outside the embedded instance.  The
    board is padded to the next power of two with the outer color scheme.
    """
    n = oracle.n
    side = next_pow2(n + 4)

    def color(p: Cell) -> int:
        p1, p2 = p
        if not (0 <= p1 < side and 0 <= p2 < side):
            raise PpadError(f"point {p} outside B_{side}")
        if p2 == 0:
            return 2
        if p1 == 0:
            return 0
        if p2 == 1:
            if 1 <= p1 <= n + 1:
                return 0
            if p1 == n + 2:
                return 2
            return 1
        if p1 == 1:
            return 1
        if p1 == n + 2 and 2 <= p2 <= n + 1:
            return 2
        if 2 <= p1 <= n + 1 and 2 <= p2 <= n + 1:
            return arrow_group(oracle.fn((p1 - 2, n - 1 - (p2 - 2))))
        return 1

    out = ColoringOracle(side, color)
    out.inner_offset = 2  # type: ignore[attr-defined]
    out.inner_n = n  # type: ignore[attr-defined]
    return out


def brouwer_point_to_arrow_cells(coloring: ColoringOracle, p: Cell):
    """The four arrow-grid cells under a 2x2 square of the reduced coloring."""
    off = getattr(coloring, "inner_offset", None)
    n = getattr(coloring, "inner_n", None)
    if off is None or n is None:
        raise PpadError("coloring was not produced by reduce_arrows_to_brouwer")
    cells = []
    for q1, q2 in ((p[0], p[1]), (p[0] + 1, p[1]), (p[0], p[1] + 1), (p[0] + 1, p[1] + 1)):
        if not (off <= q1 <= n + off - 1 and off <= q2 <= n + off - 1):
            raise NotALeaf(f"square at {p} touches the collar")
        cells.append((q1 - off, n - 1 - (q2 - off)))
    return cells


def find_trichromatic_square(coloring: ColoringOracle) -> Cell:
    """First trichromatic 2x2 square in row-major order."""
    n = coloring.n
    fn = coloring.fn
    prev = [fn((p1, 0)) for p1 in range(n)]
    for p2 in range(n - 1):
        cur = [fn((p1, p2 + 1)) for p1 in range(n)]
        for p1 in range(n - 1):
            if {prev[p1], prev[p1 + 1], cur[p1], cur[p1 + 1]} == {0, 1, 2}:
                return (p1, p2)
        prev = cur
    raise NoneFound("no trichromatic square: the coloring violates its guarantee")


def trichromatic_to_conflict(square: dict[Cell, int]):
    """A >45-degree edge-adjacent pair inside a trichromatic 2x2 square.

    Total whenever the four groups cover {0, 1, 2}: four 45-degree-
    compatible edges would confine the square to three consecutive
    octants, which never span all three groups.
    """
    cells = list(square)
    groups = {arrow_group(d) for d in square.values()}
    if groups != {0, 1, 2}:
        raise PpadError("square is not trichromatic under the grouping")
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            a, b = cells[i], cells[j]
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1:
                if abs(rotation(square[a], square[b])) > 45:
                    return (a, b)
    raise PpadError("trichromatic square without a conflicting pair")


# ---------------------------------------------------------------------------
# RLEAFD instances


@dataclass
class RleafdInstance:
    """Planar pairing digraph on the 2^k grid with the pinned start edge."""

    k: int
    edges: list[tuple[Cell, Cell]]
    succ: dict[Cell, Cell] = field(default_factory=dict, repr=False)
    pred: dict[Cell, Cell] = field(default_factory=dict, repr=False)

    @property
    def side(self) -> int:
        return 2**self.k

    def __post_init__(self):
        side = self.side
        self.succ = {}
        self.pred = {}
        seen = set()
        for u, v in self.edges:
            u, v = tuple(u), tuple(v)
            if (u, v) in seen:
                raise InvalidInstance(f"duplicate edge {u}->{v}")
            seen.add((u, v))
            for w in (u, v):
                if not (0 <= w[0] < side and 0 <= w[1] < side):
                    raise InvalidInstance(f"node {w} outside the grid")
            if abs(u[0] - v[0]) + abs(u[1] - v[1]) != 1:
                raise InvalidInstance(f"edge {u}->{v} not between grid neighbours")
            if u in self.succ:
                raise InvalidInstance(f"node {u} has out-degree above 1")
            if v in self.pred:
                raise InvalidInstance(f"node {v} has in-degree above 1")
            self.succ[u] = v
            self.pred[v] = u
        if self.succ.get((0, 0)) != (1, 0):
            raise InvalidInstance("the edge (0,0)->(1,0) is mandatory")
        if (0, 0) in self.pred:
            raise InvalidInstance("the origin must have no predecessor")
        self.edges = [(tuple(u), tuple(v)) for u, v in self.edges]

    def neighbors_of(self, u: Cell):
        """The pairing K(u) = (predecessor, successor)."""
        return (self.pred.get(u), self.succ.get(u))

    def degree(self, u: Cell) -> int:
        return (u in self.pred) + (u in self.succ)

    def directed_leaves(self) -> list[Cell]:
        nodes = set(self.pred) | set(self.succ)
        return sorted(u for u in nodes if self.degree(u) == 1 and u != (0, 0))

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "edges": [[list(u), list(v)] for u, v in self.edges]}
        )

    @staticmethod
    def from_json(text: str) -> "RleafdInstance":
        try:
            data = json.loads(text)
            k = int(data["k"])
            edges = [(tuple(map(int, u)), tuple(map(int, v))) for u, v in data["edges"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInstance(f"malformed RLEAFD file: {e}") from None
        return RleafdInstance(k, edges)


def random_rleafd(k: int, seed: int) -> RleafdInstance:
    """Random vertex-disjoint paths and cycles including the pinned start."""
    if k < 1:
        raise PpadError("k must be at least 1")
    side = 2**k
    rng = random.Random(seed)
    used = {(0, 0), (1, 0)}
    edges: list[tuple[Cell, Cell]] = [((0, 0), (1, 0))]

    def free_neighbors(u):
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            v = (u[0] + dx, u[1] + dy)
            if 0 <= v[0] < side and 0 <= v[1] < side and v not in used:
                out.append(v)
        return out

    def grow_path(start, max_len):
        cur = start
        for _ in range(max_len):
            options = free_neighbors(cur)
            if not options or rng.random() < 0.2:
                return
            nxt = rng.choice(options)
            used.add(nxt)
            edges.append((cur, nxt))
            cur = nxt

    grow_path((1, 0), rng.randrange(1, max(2, side * 2)))
    extra = rng.randrange(0, max(1, side))
    cells = [(x, y) for x in range(side) for y in range(side)]
    rng.shuffle(cells)
    started = 0
    for cell in cells:
        if started >= extra:
            break
        if cell in used:
            continue
        used.add(cell)
        before = len(edges)
        grow_path(cell, rng.randrange(1, side * 2))
        if len(edges) == before:
            used.discard(cell)  # isolated start, not a component
        else:
            started += 1
    return RleafdInstance(k, edges)


# ---------------------------------------------------------------------------
# RLEAFD -> ARROWS

BORDER = 6
BLOCK = 9

# The winding profile a corridor shows on a seam it crosses: one full
# 360-degree turn embedded in the LEFT background.  Orientation follows
# the corridor's travel direction so every block's boundary loop winds
# zero and quarter-turn tiles exist: eastbound and southbound corridors
# carry PROFILE (read bottom-to-top on vertical seams, west-to-east on
# horizontal ones), westbound and northbound ones carry its reverse.
PROFILE = [LEFT, DOWN_LEFT, DOWN, DOWN_RIGHT, RIGHT, UP_RIGHT, UP, UP_LEFT, LEFT]
PROFILE_REV = list(reversed(PROFILE))

_tile_memo: dict = {}


def _port_profile(side: str, is_in: bool) -> list[int]:
    # eastbound/southbound corridors carry the reversed profile so the
    # border's inner ring matches the +360 winding of the valid boundary
    if side == "w":
        travel = "e" if is_in else "w"
    elif side == "e":
        travel = "w" if is_in else "e"
    elif side == "s":
        travel = "n" if is_in else "s"
    else:
        travel = "s" if is_in else "n"
    return PROFILE_REV if travel in ("e", "s") else PROFILE


def _node_ports(inst: RleafdInstance, u: Cell) -> dict[str, list[int]]:
    """side -> seam profile for each corridor port of this node."""
    ports: dict[str, list[int]] = {}
    for v, name in (
        ((u[0] - 1, u[1]), "w"),
        ((u[0] + 1, u[1]), "e"),
        ((u[0], u[1] - 1), "s"),
        ((u[0], u[1] + 1), "n"),
    ):
        if inst.pred.get(u) == v:
            ports[name] = _port_profile(name, is_in=True)
        elif inst.succ.get(u) == v:
            ports[name] = _port_profile(name, is_in=False)
    return ports


def _stack(side: str, profile: list[int]) -> dict[Cell, int]:
    if side in ("w", "e"):
        return {(c, r): profile[r] for c in range(BLOCK) for r in range(BLOCK)}
    return {(c, r): profile[c] for c in range(BLOCK) for r in range(BLOCK)}


def _tip_tile(side: str, profile: list[int]) -> dict[Cell, int]:
    """Corridor stub against the background: the dead end conflicts inside."""
    tile = {}
    for c in range(BLOCK):
        for r in range(BLOCK):
            if side == "w":
                tile[(c, r)] = profile[r] if c <= 3 else LEFT
            elif side == "e":
                tile[(c, r)] = profile[r] if c >= 5 else LEFT
            elif side == "s":
                tile[(c, r)] = profile[c] if r <= 3 else LEFT
            else:
                tile[(c, r)] = profile[c] if r >= 5 else LEFT
    return tile


def _tile_for(ports: dict[str, list[int]]) -> dict[Cell, int]:
    """Block texture realizing the given port profiles, conflict-free.

    Straights are profile stacks.  Quarter turns are quarter-vortices:
    indexing the profile by the Chebyshev distance to the pivot corner is
    1-Lipschitz, keeps both seams exact, and fades to the LEFT background
    on the far sides.
    """
    names = frozenset(ports)
    if names == frozenset(("w", "e")):
        return _stack("w", ports["w"])
    if names == frozenset(("n", "s")):
        return _stack("n", ports["n"])
    last = BLOCK - 1
    if names == frozenset(("w", "n")):
        prof = ports["w"]
        return {
            (c, r): prof[last - max(c, last - r)]
            for c in range(BLOCK)
            for r in range(BLOCK)
        }
    if names == frozenset(("w", "s")):
        prof = ports["w"]
        return {(c, r): prof[max(c, r)] for c in range(BLOCK) for r in range(BLOCK)}
    if names == frozenset(("e", "n")):
        prof = ports["e"]
        return {(c, r): prof[min(c, r)] for c in range(BLOCK) for r in range(BLOCK)}
    if names == frozenset(("e", "s")):
        prof = ports["e"]
        return {
            (c, r): prof[max(last - c, r)] for c in range(BLOCK) for r in range(BLOCK)
        }
    raise PpadError(f"unsupported port combination {sorted(names)}")


_border_memo: dict = {}

# profile indices per column, away from the port: the boundary's inward
# arrows fan down to the LEFT background over the strip width
_UP_FAN = [4, 5, 6, 7, 8, 8]
_DOWN_FAN = [4, 3, 2, 1, 0, 0]


def _left_border_strip(side: int, port_rows: tuple[int, int], col6) -> dict[Cell, int]:
    """The 6-column west border: boundary fans plus the origin port.

    Below the corridor port the strip fans through the upper octants,
    above it through the lower ones; the band around the port, where one
    full profile cycle must emerge, is completed by search seeded with a
    half-vortex preference centred on the port mouth.
    """
    key = (side, port_rows)
    hit = _border_memo.get(key)
    if hit is not None:
        return hit
    lo, hi = port_rows
    import math as _math

    strip: dict[Cell, int] = {}
    band_lo, band_hi = lo - 3, hi + 3
    for r in range(side):
        for c in range(BORDER):
            if r == 0:
                idx = [5, 6, 6, 6, 6, 6][c]
            elif r == 1:
                idx = [4, 5, 6, 7, 7, 7][c]
            elif r == side - 1:
                idx = [3, 2, 2, 2, 2, 2][c]
            elif r == side - 2:
                idx = [4, 3, 2, 1, 1, 1][c]
            elif r < band_lo:
                idx = _UP_FAN[c]
            elif r > band_hi:
                idx = _DOWN_FAN[c]
            else:
                continue
            strip[(c, r)] = PROFILE[idx]
    context = {(BORDER, r): col6(r) for r in range(side)}
    context.update(strip)
    cy = (lo + hi) / 2.0
    cx = BORDER - 0.5

    def vortex_idx(c: int, r: int) -> int:
        phi = _math.degrees(_math.atan2(r - cy, c - cx))
        if phi >= 90:
            val = 4 * (phi - 90) / 90
        elif phi <= -90:
            val = 8 - 4 * (-90 - phi) / 90
        else:
            val = 0 if r > cy else 8
        return max(0, min(8, round(val)))

    def prefer(cell: Cell):
        c, r = cell
        if c == BORDER - 1 and lo <= r <= hi:
            first = PROFILE_REV[r - lo]  # the eastbound origin corridor
        else:
            first = PROFILE[vortex_idx(c, r)]
        rest = sorted(set(range(8)) - {first}, key=lambda e: abs(rotation(first, e)))
        return [first] + rest

    band = [(c, r) for c in range(BORDER) for r in range(band_lo, band_hi + 1)]
    fill = solve_arrow_region(
        band, context, (side, side), prefer, boundary_mode="strict", node_cap=500_000
    )
    strip.update(fill)
    _border_memo[key] = strip
    return strip


def reduce_rleafd_to_arrows(inst: RleafdInstance) -> tuple[ArrowOracle, ArrowGrid]:
    """Compile the pairing digraph into a strict-valid arrow field.

    Every node becomes a 9x9 block: background blocks are all LEFT,
    path blocks carry a winding corridor along their edges, and directed
    leaves are corridor dead ends, the only conflict sites.  A border
    frame absorbs the origin's corridor; padding to a power of two rides
    in the frame thickness.
    """
    blocks = 2**inst.k
    core = BLOCK * blocks
    side = next_pow2(core + 2 * BORDER)
    grid = ArrowGrid(side)
    cells = grid.cells
    for c in range(side):
        for r in range(side):
            cells[(c, r)] = LEFT
    # node tiles; two-cycles carry no leaves and stay background
    for u in sorted(set(inst.pred) | set(inst.succ)):
        v = inst.succ.get(u)
        if v is not None and inst.succ.get(v) == u:
            continue
        ports = _node_ports(inst, u)
        if u == (0, 0):
            ports["w"] = _port_profile("w", is_in=True)  # fed by the border
        if len(ports) == 2:
            tile = _tile_for(ports)
        elif len(ports) == 1:
            side_name, profile = next(iter(ports.items()))
            tile = _tip_tile(side_name, profile)
        else:
            continue
        ox = BORDER + BLOCK * u[0]
        oy = BORDER + BLOCK * u[1]
        for (c, r), d in tile.items():
            cells[(ox + c, oy + r)] = d
    # top and bottom frame rows (outside the left strip)
    for c in range(BORDER, side):
        cells[(c, 0)] = UP
        cells[(c, 1)] = UP_LEFT
        cells[(c, side - 1)] = DOWN
        cells[(c, side - 2)] = DOWN_LEFT
    cells[(side - 1, 0)] = UP_LEFT
    cells[(side - 1, 1)] = LEFT
    cells[(side - 1, side - 1)] = DOWN_LEFT
    cells[(side - 1, side - 2)] = LEFT
    # the west strip with the origin port
    port_rows = (BORDER, BORDER + BLOCK - 1)

    def col6(r: int) -> int:
        return cells[(BORDER, r)]

    strip = _left_border_strip(side, port_rows, col6)
    cells.update(strip)
    oracle = ArrowOracle(side, lambda p: cells[p])
    return oracle, grid


def block_of(inst: RleafdInstance, cell: Cell) -> Cell:
    bx = (cell[0] - BORDER) // BLOCK
    by = (cell[1] - BORDER) // BLOCK
    return (bx, by)


def map_conflict_to_leaf(inst: RleafdInstance, pair) -> Cell:
    """Block arithmetic from a conflicting cell pair to a directed leaf."""
    blocks = {block_of(inst, cell) for cell in pair}
    if len(blocks) != 1:
        raise NotALeaf(f"conflict {pair} straddles blocks {sorted(blocks)}")
    (node,) = blocks
    side = 2**inst.k
    if not (0 <= node[0] < side and 0 <= node[1] < side):
        raise NotALeaf(f"conflict {pair} lies outside the block area")
    if node == (0, 0):
        raise NotALeaf("conflict mapped to the origin")
    if inst.degree(node) != 1:
        raise NotALeaf(f"node {node} has degree {inst.degree(node)}")
    return node


def pipeline(k: int, seed: int) -> dict:
    """random instance -> arrows -> coloring -> square -> conflict -> leaf."""
    inst = random_rleafd(k, seed)
    oracle, grid = reduce_rleafd_to_arrows(inst)
    coloring = reduce_arrows_to_brouwer(oracle)
    p = find_trichromatic_square(coloring)
    arrow_cells = brouwer_point_to_arrow_cells(coloring, p)
    square = {cell: oracle(cell) for cell in arrow_cells}
    pair = trichromatic_to_conflict(square)
    leaf = map_conflict_to_leaf(inst, pair)
    return {
        "instance": inst,
        "square": p,
        "pair": pair,
        "leaf": leaf,
    }
