"""The query game: any Alice against any Bob, independently refereed.

Alice repeatedly asks for variable values; Bob answers with a fixed
value or offers a choice between at least two values (the ChooseAny
move).  The harness validates every revealed value against the problem's
constraints itself, never trusting the adversary, and counts ChooseAny
answers: t of them certify that any contradiction search tree consistent
with the transcript has at least 2^t leaves.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .csp import Csp
from . import arrows as _arrows
from . import sperner as _sperner


class GameError(Exception):
    pass


class ProtocolViolation(GameError):
    def __init__(self, side: str, message: str):
        super().__init__(f"{side}: {message}")
        self.side = side


class InvariantViolation(GameError):
    def __init__(self, ids, move_no):
        super().__init__(f"adversary invariants {ids} violated at move {move_no}")
        self.ids = ids
        self.move_no = move_no


@dataclass(frozen=True)
class Move:
    var: int
    kind: str  # "fixed" | "choose"
    value: Optional[int] = None
    options: Optional[tuple[int, ...]] = None
    chosen: Optional[int] = None


@dataclass
class Transcript:
    moves: list[Move] = field(default_factory=list)
    terminal: str = "ongoing"  # "falsified" | "conceded" | "ongoing"
    falsified: Optional[tuple] = None
    choose_any_count: int = 0
    move_count: int = 0

    @property
    def t(self) -> int:
        return self.choose_any_count


def certificate(t: int, problem: str = "", n: int = 0, alice: str = "", seed: int = 0):
    """Lower bound 2^t on the leaves of any consistent search tree."""
    return {
        "bound": 2**t,
        "t": t,
        "problem": problem,
        "n": n,
        "alice": alice,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# problems


class CspProblem:
    """Indexed falsification checks for an explicit nogood list."""

    def __init__(self, csp: Csp):
        self.csp = csp
        self.num_vars = csp.num_vars
        self.k = csp.k
        self._by_var = csp.occurrences()

    def falsified_by(self, values: dict[int, int], changed: Iterable[int]):
        seen = set()
        for var in changed:
            for g, _ in self._by_var[var]:
                if g in seen:
                    continue
                seen.add(g)
                ng = self.csp.nogoods[g]
                if all(values.get(v) == a for v, a in ng.literals):
                    return ng.literals
        return None


def problem_for(kind: str, n: int):
    if kind == "arrows":
        return _arrows.PsiConstraints(n)
    if kind == "sperner":
        return _sperner.PhiConstraints(n)
    raise GameError(f"unknown problem kind {kind!r}")


# ---------------------------------------------------------------------------
# adversary adapters


class ArrowsBob:
    kind = "arrows"

    def __init__(self, n: int):
        self.n = n
        self.state = _arrows.bob_arrows_new(n)
        self._checked_b0 = self.state.buffer_col0

    @property
    def conceded(self) -> bool:
        return self.state.conceded

    @property
    def choose_any_count(self) -> int:
        return self.state.choose_any_count

    def answer(self, var: int):
        return _arrows.bob_arrows_answer(self.state, _arrows.id_cell(var, self.n))

    def on_choice(self, var: int, value: int) -> None:
        _arrows.bob_arrows_on_choice(self.state, value)

    def board(self) -> dict[int, int]:
        return self.state.board_view()

    def reveals_delta(self) -> list[tuple[int, int]]:
        """Cells assigned during the move in progress (since answer())."""
        n, grid = self.n, self.state.grid
        return [
            (_arrows.cell_id(c, n), grid[c]) for c in self.state.last_move_fills
        ]

    def check_invariants(self):
        """Per-move check: incremental form, complete when run every move."""
        prev = getattr(self, "_checked_b0", self.state.buffer_col0)
        bad = _arrows.check_arrows_invariants_incremental(
            self.state, self.state.last_move_fills, prev
        )
        self._checked_b0 = self.state.buffer_col0
        return bad

    def check_invariants_full(self):
        return _arrows.check_arrows_invariants(self.state)


class SpernerBob:
    kind = "sperner"

    def __init__(self, n: int):
        self.n = n
        self.state = _sperner.bob_sperner_new(n)
        self._ids = _sperner.vertex_ids(n)
        self._vertices = _sperner.vertices(n)

    @property
    def conceded(self) -> bool:
        return self.state.conceded

    @property
    def choose_any_count(self) -> int:
        return self.state.choose_any_count

    def answer(self, var: int):
        return _sperner.bob_sperner_answer(self.state, self._vertices[var])

    def on_choice(self, var: int, value: int) -> None:
        _sperner.bob_sperner_on_choice(self.state, value)

    def board(self) -> dict[int, int]:
        return self.state.board_view()

    def reveals_delta(self) -> list[tuple[int, int]]:
        ids, coloring = self._ids, self.state.coloring
        return [(ids[v], coloring[v]) for v in self.state.last_move_colored]

    def check_invariants(self):
        return _sperner.check_sperner_invariants(self.state)


def bob_for(kind: str, n: int):
    if kind == "arrows":
        return ArrowsBob(n)
    if kind == "sperner":
        return SpernerBob(n)
    raise GameError(f"unknown problem kind {kind!r}")


# ---------------------------------------------------------------------------
# alice strategies


class BoardView:
    """What Alice sees: the public board plus problem geometry."""

    def __init__(self, kind: str, n: int, num_vars: int, coords, neighbors):
        self.kind = kind
        self.n = n
        self.num_vars = num_vars
        self.coords = coords
        self.neighbors = neighbors
        self.board: dict[int, int] = {}


def view_for(kind: str, n: int) -> BoardView:
    if kind == "arrows":
        def coords(var):
            return _arrows.id_cell(var, n)

        def neighbors(var):
            col, row = _arrows.id_cell(var, n)
            out = []
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nb = (col + dx, row + dy)
                if 0 <= nb[0] < n and 0 <= nb[1] < n:
                    out.append(_arrows.cell_id(nb, n))
            return out

        return BoardView(kind, n, n * n, coords, neighbors)
    if kind == "sperner":
        verts = _sperner.vertices(n)
        ids = _sperner.vertex_ids(n)

        def coords(var):
            return verts[var]

        def neighbors(var):
            return [ids[w] for w in _sperner.neighbors(verts[var], n)]

        return BoardView(kind, n, len(verts), coords, neighbors)
    raise GameError(f"unknown problem kind {kind!r}")


class RandomAlice:
    name = "random"

    def __init__(self, view: BoardView, seed: int):
        self.rng = random.Random(seed)
        order = list(range(view.num_vars))
        self.rng.shuffle(order)
        self._order = order
        self._pos = 0

    def next_query(self, board) -> int:
        while self._order[self._pos] in board:
            self._pos += 1
        var = self._order[self._pos]
        self._pos += 1
        return var

    def choose(self, board, var, options):
        return self.rng.choice(list(options))


class RowSweepAlice:
    name = "row_sweep"

    def __init__(self, view: BoardView, seed: int = 0):
        self._pos = 0

    def next_query(self, board) -> int:
        while self._pos in board:
            self._pos += 1
        var = self._pos
        self._pos += 1
        return var

    def choose(self, board, var, options):
        return min(options)


class BoundaryFirstAlice:
    name = "boundary_first"

    def __init__(self, view: BoardView, seed: int = 0):
        n = view.n
        boundary = []
        interior = []
        for var in range(view.num_vars):
            c = view.coords(var)
            if view.kind == "arrows":
                on_edge = c[0] in (0, n - 1) or c[1] in (0, n - 1)
            else:
                on_edge = c[0] == 0 or c[1] == 0 or c[0] + c[1] == n - 1
            (boundary if on_edge else interior).append(var)
        self._order = boundary + interior
        self._pos = 0

    def next_query(self, board) -> int:
        while self._order[self._pos] in board:
            self._pos += 1
        var = self._order[self._pos]
        self._pos += 1
        return var

    def choose(self, board, var, options):
        return min(options)


class BufferHunterAlice:
    """Chases the frontier of the latest non-fixed reveal region."""

    name = "buffer_hunter"

    def __init__(self, view: BoardView, seed: int):
        self.view = view
        self.rng = random.Random(seed)
        self._frontier: list[int] = []
        fallback = list(range(view.num_vars))
        self.rng.shuffle(fallback)
        self._fallback = fallback
        self._pos = 0

    def next_query(self, board) -> int:
        while self._frontier:
            var = self._frontier.pop()
            if var not in board:
                return var
        while self._fallback[self._pos] in board:
            self._pos += 1
        var = self._fallback[self._pos]
        self._pos += 1
        return var

    def choose(self, board, var, options):
        return self.rng.choice(list(options))

    def observe(self, var: int, kind: str, board) -> None:
        if kind != "choose":
            return
        frontier = [w for w in self.view.neighbors(var) if w not in board]
        self.rng.shuffle(frontier)
        self._frontier.extend(frontier)


ALICE_FACTORIES = {
    "random": RandomAlice,
    "row_sweep": RowSweepAlice,
    "boundary_first": BoundaryFirstAlice,
    "buffer_hunter": BufferHunterAlice,
}


def alice_library(view: BoardView, seed: int) -> dict[str, object]:
    return {name: cls(view, seed) for name, cls in ALICE_FACTORIES.items()}


# ---------------------------------------------------------------------------
# the referee


def play(
    problem,
    alice,
    bob,
    move_cap: Optional[int] = None,
    paranoid: bool = False,
    record_moves: bool = True,
) -> Transcript:
    """Run the game loop; validation never trusts either player.

    The public board is Bob's whole revealed assignment after each move
    (Bob may silently assign extra variables).  Falsification is decided
    by the problem object on the revealed values, and Fixed answers must
    agree with previously revealed values.
    """
    if move_cap is None:
        move_cap = problem.num_vars + 1
    transcript = Transcript()
    board: dict[int, int] = dict(bob.board())
    hit = problem.falsified_by(board, list(board))
    if hit is not None:
        transcript.terminal = "falsified"
        transcript.falsified = tuple(hit)
        return transcript
    has_delta = hasattr(bob, "reveals_delta")

    def absorb() -> list[int]:
        """Merge the adversary's reveals; return the changed variables."""
        if has_delta:
            delta = bob.reveals_delta()
        else:
            snapshot = dict(bob.board())
            delta = [(v, snapshot[v]) for v in snapshot if v not in board]
            for v, old in board.items():
                if snapshot.get(v) != old:
                    raise ProtocolViolation("bob", f"revealed value changed at {v}")
        changed = []
        for v, value in delta:
            if v in board:
                if board[v] != value:
                    raise ProtocolViolation("bob", f"revealed value changed at {v}")
                continue
            board[v] = value
            changed.append(v)
        return changed

    for move_no in range(move_cap):
        if bob.conceded:
            transcript.terminal = "conceded"
            return transcript
        var = alice.next_query(board)
        if not (0 <= var < problem.num_vars):
            raise ProtocolViolation("alice", f"query {var} out of range")
        if var in board:
            raise ProtocolViolation("alice", f"re-queried revealed variable {var}")
        result = bob.answer(var)
        kind = result[0]
        if kind == "conceded":
            transcript.move_count += 1
            transcript.terminal = "conceded"
            return transcript
        move: Optional[Move] = None
        if kind == "fixed":
            value = result[1]
            if not (0 <= value < problem.k):
                raise ProtocolViolation("bob", f"fixed value {value} out of range")
            move = Move(var, "fixed", value=value)
        elif kind == "choose":
            options = tuple(result[1])
            if len(set(options)) < 2 or any(
                not (0 <= o < problem.k) for o in options
            ):
                raise ProtocolViolation("bob", f"bad option set {options}")
            chosen = alice.choose(board, var, options)
            if chosen not in options:
                raise ProtocolViolation("alice", f"chose {chosen} outside {options}")
            bob.on_choice(var, chosen)
            transcript.choose_any_count += 1
            move = Move(var, "choose", options=options, chosen=chosen)
        else:
            raise ProtocolViolation("bob", f"unknown answer kind {kind!r}")
        changed = absorb()
        if not bob.conceded and var not in board:
            raise ProtocolViolation("bob", f"answered variable {var} not on the board")
        if hasattr(alice, "observe"):
            alice.observe(var, kind, board)
        transcript.move_count += 1
        if record_moves and move is not None:
            transcript.moves.append(move)
        hit = problem.falsified_by(board, changed)
        if hit is not None:
            transcript.terminal = "falsified"
            transcript.falsified = tuple(hit)
            return transcript
        if paranoid and kind == "choose" and hasattr(bob, "check_invariants"):
            bad = bob.check_invariants()
            if bad and not bob.conceded:
                raise InvariantViolation(bad, move_no)
        if bob.conceded:
            transcript.terminal = "conceded"
            return transcript
    transcript.terminal = "ongoing"
    return transcript


def write_transcript(transcript: Transcript, fh, summary_extra: Optional[dict] = None):
    """Line-delimited JSON: one move per line, then a summary record."""
    for m in transcript.moves:
        rec = {"var": m.var, "kind": m.kind}
        if m.kind == "fixed":
            rec["value"] = m.value
        else:
            rec["options"] = list(m.options)
            rec["chosen"] = m.chosen
        fh.write(json.dumps(rec) + "\n")
    summary = {
        "t": transcript.t,
        "terminal": transcript.terminal,
        "certificate": 2**transcript.t,
    }
    if transcript.falsified is not None:
        summary["falsified"] = [list(lit) for lit in transcript.falsified]
    if summary_extra:
        summary.update(summary_extra)
    fh.write(json.dumps(summary) + "\n")
