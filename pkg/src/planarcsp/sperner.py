"""Triangle-coloring CSP and the path-hiding adversary.

Vertices live on the lattice {(x, y) : x, y >= 0, x + y <= n-1} with
edges east, north, and the (1,-1) diagonal, so each unit cell splits
into an Up and a Down triangle.  The three corners carry fixed distinct
colors, each side is two-colored, and no small triangle may show all
three colors; the resulting CSP is unsatisfiable.

The adversary maintains a green path P from the left side, rays RP
(east) and DP (south-east) from its end, and an uncolored parallelogram
H between the rays and the border where the inevitable trichromatic
triangle stays hidden.  Everything outside H is colored in two "seas"
(green above the staircase, blue below) whose seams are safe by
construction; queries inside H are answered with two-option offers and
the buffer relocates along clear segment groups, exactly the shape a
figure-less reconstruction of the strategy needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .csp import Csp, Nogood

RED, GREEN, BLUE = 0, 1, 2
COLOR_NAMES = ["red", "green", "blue"]

Vertex = tuple[int, int]

SPERNER_MIN_N = 32

# the six lattice neighbours (east, west, north, south, se, nw)
NEIGHBOR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


class SpernerError(Exception):
    pass


class TerminalGame(SpernerError):
    pass


class IllegalColor(SpernerError):
    pass


def hexdist(a: Vertex, b: Vertex) -> int:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return (abs(dx) + abs(dy) + abs(dx + dy)) // 2


def vertices(n: int) -> list[Vertex]:
    """All lattice vertices, ordered row-major bottom-up."""
    return [(x, y) for y in range(n) for x in range(n - y)]


def vertex_ids(n: int) -> dict[Vertex, int]:
    return {v: i for i, v in enumerate(vertices(n))}


def in_triangle(v: Vertex, n: int) -> bool:
    x, y = v
    return x >= 0 and y >= 0 and x + y <= n - 1


def neighbors(v: Vertex, n: int):
    x, y = v
    for dx, dy in NEIGHBOR_STEPS:
        w = (x + dx, y + dy)
        if in_triangle(w, n):
            yield w


def small_triangles(n: int):
    """(kind, anchor, vertices) row-major; Up before Down per anchor."""
    for y in range(n):
        for x in range(n - y):
            if x + y <= n - 2:
                yield ("up", (x, y), ((x, y), (x + 1, y), (x, y + 1)))
            if x + y <= n - 3:
                yield ("down", (x, y), ((x + 1, y), (x, y + 1), (x + 1, y + 1)))


def triangles_at(v: Vertex, n: int):
    """The up/down triangles containing vertex v."""
    x, y = v
    anchors = [
        ("up", (x, y)),
        ("up", (x - 1, y)),
        ("up", (x, y - 1)),
        ("down", (x - 1, y)),
        ("down", (x, y - 1)),
        ("down", (x - 1, y - 1)),
    ]
    for kind, (ax, ay) in anchors:
        if ax < 0 or ay < 0:
            continue
        if kind == "up":
            if ax + ay <= n - 2:
                yield ((ax, ay), (ax + 1, ay), (ax, ay + 1))
        else:
            if ax + ay <= n - 3:
                yield ((ax + 1, ay), (ax, ay + 1), (ax + 1, ay + 1))


def side_allowed(v: Vertex, n: int) -> set[int]:
    """Colors allowed by the corner/side constraints at this vertex."""
    x, y = v
    if (x, y) == (0, 0):
        return {GREEN}
    if (x, y) == (n - 1, 0):
        return {RED}
    if (x, y) == (0, n - 1):
        return {BLUE}
    if x == 0:
        return {GREEN, BLUE}
    if y == 0:
        return {GREEN, RED}
    if x + y == n - 1:
        return {BLUE, RED}
    return {RED, GREEN, BLUE}


def generate_phi(n: int) -> tuple[Csp, dict]:
    """CSP over the n(n+1)/2 vertices, k=3 colors.

    Unary nogoods pin the corners and two-color the sides; six nogoods
    per small triangle forbid trichromatic labelings.
    """
    if n < 2:
        raise SpernerError("n must be at least 2")
    ids = vertex_ids(n)
    nogoods: list[Nogood] = []
    for v, var in ids.items():
        allowed = side_allowed(v, n)
        for c in range(3):
            if c not in allowed:
                nogoods.append(Nogood.of([(var, c)]))
    for _, _, tri in small_triangles(n):
        a, b, c = (ids[t] for t in tri)
        for pa, pb, pc in (
            (RED, GREEN, BLUE),
            (RED, BLUE, GREEN),
            (GREEN, RED, BLUE),
            (GREEN, BLUE, RED),
            (BLUE, RED, GREEN),
            (BLUE, GREEN, RED),
        ):
            nogoods.append(Nogood.of([(a, pa), (b, pb), (c, pc)]))
    names = [f"v{x},{y}" for (x, y) in vertices(n)]
    csp = Csp(len(ids), 3, nogoods, var_names=names)
    index_map = {
        "n": n,
        "k": 3,
        "colors": COLOR_NAMES,
        "vars": [{"id": i, "x": v[0], "y": v[1]} for v, i in ids.items()],
    }
    return csp, index_map


def find_trichromatic(n: int, coloring: dict[Vertex, int]):
    """First fully colored trichromatic small triangle, row-major."""
    for kind, anchor, tri in small_triangles(n):
        cols = [coloring.get(v) for v in tri]
        if None not in cols and len(set(cols)) == 3:
            return (kind, anchor, tri)
    return None


class PhiConstraints:
    """Implicit constraint view of phi_n for game play at large n."""

    def __init__(self, n: int):
        self.n = n
        self.k = 3
        self._vertices = vertices(n)
        self._ids = vertex_ids(n)
        self.num_vars = len(self._vertices)

    def coords(self, var: int) -> Vertex:
        return self._vertices[var]

    def falsified_by(self, values: dict[int, int], changed: Iterable[int]):
        n = self.n
        for var in changed:
            if var not in values:
                continue
            v = self._vertices[var]
            c = values[var]
            if c not in side_allowed(v, n):
                return ((var, c),)
            for tri in triangles_at(v, n):
                ids = [self._ids[t] for t in tri]
                cols = [values.get(i) for i in ids]
                if None not in cols and len(set(cols)) == 3:
                    return tuple(sorted(zip(ids, cols)))
        return None


# ---------------------------------------------------------------------------
# the adversary


@dataclass
class BobSpernerState:
    n: int
    coloring: dict[Vertex, int] = field(default_factory=dict)
    path: list[Vertex] = field(default_factory=list)
    conceded: bool = False
    choose_any_count: int = 0
    pending: Optional[dict] = None
    last_move_colored: list[Vertex] = field(default_factory=list)
    fallback: bool = False  # small boards: greedy fixed answers only

    @property
    def f(self) -> Vertex:
        return self.path[-1]

    @property
    def diag(self) -> int:
        return self.f[0] + self.f[1]

    def rp(self) -> list[Vertex]:
        fx, fy = self.f
        return [(x, fy) for x in range(fx + 1, self.n - 1 - fy)]

    def dp(self) -> list[Vertex]:
        fx, fy = self.f
        return [(fx + i, fy - i) for i in range(1, fy)]

    def in_h(self, v: Vertex) -> bool:
        x, y = v
        return in_triangle(v, self.n) and y <= self.f[1] and x + y >= self.diag

    def h_interior(self, v: Vertex) -> bool:
        x, y = v
        return (
            self.in_h(v)
            and y >= 1
            and x + y <= self.n - 2
            and v != self.f
            and y != self.f[1]  # not on RP's row inside H
            and x + y != self.diag  # not on DP's diagonal
        )

    def buffer_cells(self) -> list[Vertex]:
        fx, fy = self.f
        d = self.diag
        out = []
        for v in self._h_box():
            if not self.h_interior(v):
                continue
            x, y = v
            if y in (fy - 1, fy - 2) or x + y in (d + 1, d + 2):
                out.append(v)
        return out

    def _h_box(self):
        fx, fy = self.f
        for y in range(0, fy + 1):
            for x in range(max(0, self.diag - y), self.n - y):
                yield (x, y)

    def board_view(self) -> dict[int, int]:
        ids = vertex_ids(self.n)
        return {ids[v]: c for v, c in self.coloring.items()}


def _stair_map(state: BobSpernerState) -> dict[int, int]:
    """Column -> staircase row for P followed by RP."""
    stair = {}
    for x, y in state.path:
        stair[x] = y
    fx, fy = state.f
    for x in range(fx + 1, state.n - 1 - fy):
        stair[x] = fy
    return stair


def _zone_color(state: BobSpernerState, v: Vertex, stair: dict[int, int]) -> int:
    """Preferred color for territory outside H."""
    x, y = v
    n = state.n
    if x + y == n - 1:
        return BLUE  # exposed hypotenuse
    if y == 0:
        return GREEN  # exposed bottom
    sy = stair.get(x)
    if sy is not None and y > sy:
        return GREEN  # the sea above the staircase
    return BLUE  # below the path / left of DP


def _is_color_safe(state: BobSpernerState, v: Vertex, c: int) -> bool:
    if c not in side_allowed(v, state.n):
        return False
    coloring = state.coloring
    for tri in triangles_at(v, state.n):
        cols = []
        for t in tri:
            cols.append(c if t == v else coloring.get(t))
        if None not in cols and len(set(cols)) == 3:
            return False
    return True


def _safe_colors(state: BobSpernerState, v: Vertex) -> list[int]:
    return [c for c in (RED, GREEN, BLUE) if _is_color_safe(state, v, c)]


def _paint(state: BobSpernerState, v: Vertex, c: int) -> bool:
    if v in state.coloring:
        return state.coloring[v] == c
    if not _is_color_safe(state, v, c):
        return False
    state.coloring[v] = c
    state.last_move_colored.append(v)
    return True


def _paint_preferring(state: BobSpernerState, v: Vertex, preferred: int) -> bool:
    """Color v with `preferred` if safe, else any safe color."""
    if v in state.coloring:
        return True
    order = [preferred] + [c for c in (GREEN, BLUE, RED) if c != preferred]
    for c in order:
        if _paint(state, v, c):
            return True
    return False


def _solve_color_region(
    state: BobSpernerState, cells: list[Vertex], prefer, node_cap: int = 200_000
) -> bool:
    """Backtracking fill of `cells`; colors land in the state's coloring.

    Greedy zone fills can wedge themselves next to old red rings, so the
    exposure uses chronological backtracking with the zone color first in
    each cell's candidate order.  Returns False when no fill exists
    within the budget (the adversary then concedes).
    """
    order = [v for v in cells if v not in state.coloring]
    if not order:
        return True
    coloring = state.coloring
    assigned: dict[Vertex, int] = {}

    def candidates(v: Vertex) -> list[int]:
        out = []
        for c in prefer(v):
            if c not in side_allowed(v, state.n):
                continue
            ok = True
            for tri in triangles_at(v, state.n):
                cols = []
                for t in tri:
                    cc = c if t == v else coloring.get(t, assigned.get(t))
                    cols.append(cc)
                if None not in cols and len(set(cols)) == 3:
                    ok = False
                    break
            if ok:
                out.append(c)
        return out

    nodes = 0
    stack: list[list[int]] = [candidates(order[0])]
    while stack:
        k = len(stack) - 1
        opts = stack[-1]
        if not opts:
            stack.pop()
            assigned.pop(order[k], None)
            continue
        nodes += 1
        if nodes > node_cap:
            return False
        assigned[order[k]] = opts.pop(0)
        if k + 1 == len(order):
            for v, c in assigned.items():
                coloring[v] = c
                state.last_move_colored.append(v)
            return True
        stack.append(candidates(order[k + 1]))
    return False


def _closure(state: BobSpernerState, seeds: Iterable[Vertex]) -> bool:
    """Force singleton-safe uncolored vertices near fresh colorings.

    Returns False (and concedes nothing itself) when some uncolored
    vertex has no safe color left.
    """
    queue = list(seeds)
    seen = set()
    while queue:
        v = queue.pop()
        for tri in triangles_at(v, state.n):
            for w in tri:
                if w in state.coloring or w in seen:
                    continue
                safe = _safe_colors(state, w)
                if not safe:
                    return False
                if len(safe) == 1:
                    seen.add(w)
                    if not _paint(state, w, safe[0]):
                        return False
                    queue.append(w)
    return True


def bob_sperner_new(n: int) -> BobSpernerState:
    """Fresh adversary with the two-sea pre-coloring and open parallelogram."""
    if n < 2:
        raise SpernerError("n must be at least 2")
    state = BobSpernerState(n=n)
    if n < SPERNER_MIN_N:
        state.fallback = True
        return state
    m = (n + 1) // 2
    f0 = (0, m - 1)
    state.path = [f0]
    stair = _stair_map(state)
    coloring = state.coloring
    # left side: green chain below the start, blue just below the path,
    # the green start itself, blue above
    for y in range(n):
        v = (0, y)
        if y == m - 1:
            coloring[v] = GREEN
        elif y == m - 2:
            coloring[v] = BLUE
        elif y <= m - 3:
            coloring[v] = GREEN
        else:
            coloring[v] = BLUE
    for v in state.rp():
        coloring[v] = GREEN
    for v in state.dp():
        coloring[v] = BLUE
    for v in vertices(n):
        if v in coloring or state.in_h(v) or v[0] == 0:
            continue
        coloring[v] = _zone_color(state, v, stair)
    _place_guards(state)
    coloring[(n - 1, 0)] = RED  # the red corner stays isolated inside H
    assert find_trichromatic(n, coloring) is None
    return state


def _place_guards(state: BobSpernerState) -> None:
    """Colored buffers where H's border approaches the rays.

    Three cells per side: queries just beyond the guards ring red one
    step inward, and the nearest such ring cell must still clear the
    buffer (distance-2 zone) around the rays.
    """
    n = state.n
    fx, fy = state.f
    d = state.diag
    for v in [(n - 1 - fy, fy), (n - fy, fy - 1), (n + 1 - fy, fy - 2)]:
        if in_triangle(v, n) and v not in state.coloring and v[0] + v[1] == n - 1:
            _paint_preferring(state, v, BLUE)
    for v in [(d, 0), (d + 1, 0), (d + 2, 0)]:
        if in_triangle(v, n) and v not in state.coloring and v != (n - 1, 0):
            _paint_preferring(state, v, GREEN)


def check_sperner_invariants(state: BobSpernerState) -> list[str]:
    """Violated invariant ids; empty when every maintained property holds."""
    if state.fallback:
        return []
    bad: list[str] = []
    n = state.n
    m = (n + 1) // 2
    coloring = state.coloring
    # 1a: upper left side blue
    if any(coloring.get((0, y)) != BLUE for y in range(m, n)):
        bad.append("1a")
    # 1b: lower left side green (the below-path vertex excepted)
    lower = [coloring.get((0, y)) for y in range(0, m - 2)]
    if any(c != GREEN for c in lower):
        bad.append("1b")
    # 1c: side legality of border colors (bottom green/red, hyp blue/red)
    ok = True
    for x in range(1, n - 1):
        c = coloring.get((x, 0))
        if c is not None and c not in (GREEN, RED):
            ok = False
    for y in range(0, n - 1):
        v = (n - 1 - y, y)
        c = coloring.get(v)
        if c is not None and v != (n - 1, 0) and c not in (BLUE, RED):
            ok = False
    if not ok:
        bad.append("1c")
    # 2: the buffer is empty
    if any(v in coloring for v in state.buffer_cells()):
        bad.append("2")
    # 3: the path is green and everything just below it is colored
    if any(coloring.get(v) != GREEN for v in state.path):
        bad.append("3")
    else:
        for (x, y), (x2, y2) in zip(state.path, state.path[1:]):
            below = (x2, y2 - 1) if y2 == y else (x, y - 1)
            if in_triangle(below, n) and below not in coloring:
                bad.append("3")
                break
    # 4/5: everything outside H is colored
    stair = _stair_map(state)
    for v in vertices(n):
        if state.in_h(v) or v in coloring:
            continue
        bad.append("4" if v[1] > stair.get(v[0], -1) else "5")
        break
    # 6: rays
    if any(coloring.get(v) != GREEN for v in state.rp()) or any(
        coloring.get(v) != BLUE for v in state.dp()
    ):
        bad.append("6")
    # 7: green/blue vertices deep inside H are sealed by colored neighbours
    rays = set(state.rp()) | set(state.dp()) | {state.f}
    for v in list(coloring):
        if not state.h_interior(v) or coloring[v] == RED:
            continue
        if min((hexdist(v, r) for r in rays), default=99) <= 3:
            continue
        if any(w not in coloring for w in neighbors(v, n)):
            bad.append("7")
            break
    # 8: uncolored vertices only inside H
    for v in vertices(n):
        if v not in coloring and not state.in_h(v):
            bad.append("8")
            break
    # safety: no trichromatic triangle anywhere
    if find_trichromatic(n, coloring) is not None:
        bad.append("S")
    return sorted(set(bad))


def _classify(state: BobSpernerState, v: Vertex) -> str:
    # the red ring of a case-4 answer reaches one step out, so queries up
    # to distance 3 relocate the buffer; the buffer itself (inv. 2) stays
    # the distance <= 2 zone
    x, y = v
    n = state.n
    if y == 0 or x + y == n - 1:
        return "border"
    rp = set(state.rp()) | {state.f}
    dp = set(state.dp())
    d_rp = min((hexdist(v, r) for r in rp), default=99)
    d_dp = min((hexdist(v, r) for r in dp), default=99)
    if d_rp == 1:
        return "case2"
    if d_dp == 1:
        return "case3"
    if d_rp <= 3 or d_dp <= 3:
        return "case1"
    return "case4"


_CASE_OFFERS = {
    "case1": (GREEN, BLUE),
    "case2": (GREEN, RED),
    "case3": (BLUE, RED),
    "case4": (GREEN, BLUE),
}


def bob_sperner_answer(state: BobSpernerState, v: Vertex):
    """('fixed', color) | ('choose', options) | ('conceded', None)."""
    if state.conceded:
        raise TerminalGame("bob already conceded")
    if state.pending is not None:
        raise TerminalGame("awaiting a choice")
    if not in_triangle(v, state.n):
        raise SpernerError(f"vertex {v} outside the board")
    state.last_move_colored = []
    c = state.coloring.get(v)
    if c is not None:
        return ("fixed", c)
    if state.fallback:
        for c in (RED, GREEN, BLUE):
            if _paint(state, v, c):
                return ("fixed", c)
        # no safe color survives: answer legally and lose honestly
        allowed = sorted(side_allowed(v, state.n))
        if allowed:
            state.coloring[v] = allowed[0]
            state.last_move_colored.append(v)
            return ("fixed", allowed[0])
        state.conceded = True
        return ("conceded", None)
    if not state.in_h(v):
        # invariant 8 says this cannot happen; concede defensively
        state.conceded = True
        return ("conceded", None)
    case = _classify(state, v)
    if case == "border":
        legal = sorted(side_allowed(v, state.n) & set(_safe_colors(state, v)))
        if len(legal) < 2:
            state.conceded = True
            return ("conceded", None)
        options = tuple(legal[:2])
        state.pending = {"case": "case4", "cell": v, "options": options}
        return ("choose", options)
    offer = _CASE_OFFERS[case]
    safe = _safe_colors(state, v)
    options = tuple(c for c in offer if c in safe)
    if len(options) < 2:
        options = tuple(safe[:2])
        if len(options) < 2:
            state.conceded = True
            return ("conceded", None)
    state.pending = {"case": case, "cell": v, "options": options}
    return ("choose", options)


def bob_sperner_on_choice(state: BobSpernerState, color: int) -> None:
    if state.pending is None:
        raise TerminalGame("no pending choice")
    pending = state.pending
    v = pending["cell"]
    if color not in pending["options"]:
        raise IllegalColor(f"{color} not among offered {pending['options']}")
    state.pending = None
    state.choose_any_count += 1
    case = pending["case"]
    if not _paint(state, v, color):
        state.conceded = True
        return
    if case == "case4":
        for w in neighbors(v, state.n):
            if w not in state.coloring:
                if not _paint_preferring(state, w, RED):
                    state.conceded = True
                    return
        if not _closure(state, [v]):
            state.conceded = True
        return
    # cases 1-3 move the buffer
    down_type = (case == "case2") or (case == "case1" and color == GREEN)
    if not _relocate_sperner(state, v, down_type):
        state.conceded = True


def _clear_group(state: BobSpernerState, rows_or_diags: list[int], kind: str) -> bool:
    """A segment group is clear while no interior vertex of it is colored."""
    n = state.n
    if kind == "h":
        for y in rows_or_diags:
            if y < 1:
                return False
            for x in range(max(1, state.diag - y), n - 1 - y):
                v = (x, y)
                if v in state.coloring and state.h_interior(v):
                    return False
    else:
        for dgl in rows_or_diags:
            if dgl > n - 2:
                return False
            for y in range(1, min(state.f[1], dgl) + 1):
                v = (dgl - y, y)
                if v in state.coloring and state.h_interior(v):
                    return False
    return True


def _relocate_sperner(state: BobSpernerState, v: Vertex, down_type: bool) -> bool:
    n = state.n
    fx, fy = state.f
    d = state.diag
    new_fy = None
    j = 0
    while fy - 4 - 4 * j - 3 >= 1:
        rows = [fy - 4 - 4 * j - r for r in range(4)]
        if _clear_group(state, rows, "h"):
            new_fy = rows[1]
            break
        j += 1
    new_d = None
    i = 0
    while d + 4 + 4 * i + 3 <= n - 2:
        diags = [d + 4 + 4 * i + r for r in range(4)]
        if _clear_group(state, diags, "d"):
            new_d = diags[1]
            break
        i += 1
    if new_fy is None or new_d is None or new_fy < 3 or new_d > n - 4:
        return False
    new_f = (new_d - new_fy, new_fy)
    if new_f[0] <= fx or not in_triangle((new_f[0] + 1, new_fy), n):
        return False
    waypoints = _extension(state, new_f, down_type)
    if waypoints is None:
        waypoints = _extension(state, new_f, not down_type)
        if waypoints is None:
            return False
    old_h = [u for u in state._h_box() if u not in state.coloring]
    # the path extension turns green; its underside blue
    for w in waypoints:
        if not _paint_preferring(state, w, GREEN) or state.coloring[w] != GREEN:
            return False
    prev = (fx, fy)
    below: list[Vertex] = []
    for w in waypoints:
        if w[1] == prev[1]:
            below.append((w[0], w[1] - 1))
        else:
            below.append((prev[0], prev[1] - 1))
        prev = w
    state.path.extend(waypoints)
    for b in below:
        if in_triangle(b, n) and b not in state.coloring:
            if not _paint_preferring(state, b, BLUE):
                return False
    for r in state.rp():
        if not _paint_preferring(state, r, GREEN) or state.coloring[r] != GREEN:
            return False
    for r in state.dp():
        if not _paint_preferring(state, r, BLUE) or state.coloring[r] != BLUE:
            return False
    _place_guards(state)
    stair = _stair_map(state)
    exposed = []
    for u in old_h:
        if u not in state.coloring and not state.in_h(u):
            exposed.append(u)
    # row-major from the constrained bottom edge upward: consecutive
    # cells stay adjacent, so a wedge beside an old ring backtracks into
    # its actual neighbours instead of an unrelated tail
    exposed.sort(key=lambda u: (u[1], u[0]))

    def prefer(u: Vertex) -> list[int]:
        zone = _zone_color(state, u, stair)
        return [zone] + [c for c in (GREEN, BLUE, RED) if c != zone]

    if not _solve_color_region(state, exposed, prefer):
        return False
    return _closure(state, state.last_move_colored)


def _extension(state: BobSpernerState, new_f: Vertex, down_type: bool):
    """Waypoints from f to new_f by unit right and right-down steps.

    The right-type extension rides the old RP east then descends the new
    diagonal; the down-type drops early along a near diagonal and walks
    the row above the target.  Returns None if a waypoint is colored with
    anything but green.
    """
    fx, fy = state.f
    nfx, nfy = new_f
    rights = (nfx + nfy) - (fx + fy)
    downs = fy - nfy
    if rights < 1 or downs < 1:
        return None

    def ok(path: list[Vertex]) -> bool:
        return all(
            in_triangle(w, state.n) and state.coloring.get(w, GREEN) == GREEN
            for w in path
        )

    if not down_type:
        path = [(fx + i, fy) for i in range(1, rights + 1)]
        path += [(fx + rights + t, fy - t) for t in range(1, downs + 1)]
        return path if ok(path) else None
    for w in (1, 2, 3):
        if w > rights:
            break
        path = [(fx + i, fy) for i in range(1, w + 1)]
        x, y = fx + w, fy
        while y > nfy + 1:
            x, y = x + 1, y - 1
            path.append((x, y))
        while x < nfx - 1:
            x += 1
            path.append((x, y))
        path.append((nfx, nfy))
        # validate steps: every hop is (1,0) or (1,-1)
        prev = (fx, fy)
        good = True
        for p in path:
            dx, dy = p[0] - prev[0], p[1] - prev[1]
            if (dx, dy) not in ((1, 0), (1, -1)):
                good = False
                break
            prev = p
        if good and ok(path):
            return path
    return None
