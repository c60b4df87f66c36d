"""Minimal HTTP/JSON API for playing the query game as Alice.

The server owns every rule: queries and choices go through the adversary
state machines, every revealed value is validated against the problem's
constraints, and the client only renders state.  Sessions are in-memory,
independently locked, and optionally snapshotted to disk as JSON so a
restart can resume them.
"""

from __future__ import annotations

import json
import os
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from . import __version__, arrows, game, sperner

DEFAULT_TTL = 3600.0


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    id: str
    problem: str
    n: int
    bob: object
    checker: object
    board: dict[int, int] = field(default_factory=dict)
    phase: str = "await_query"  # await_query | await_choice | terminal
    pending_var: Optional[int] = None
    pending_options: Optional[tuple[int, ...]] = None
    outcome: Optional[dict] = None
    move_count: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_active: float = field(default_factory=time.time)

    @property
    def t(self) -> int:
        return self.bob.choose_any_count

    def public_state(self) -> dict:
        return {
            "game_id": self.id,
            "problem": self.problem,
            "n": self.n,
            "k": 8 if self.problem == "arrows" else 3,
            "phase": self.phase,
            "board": {str(v): c for v, c in sorted(self.board.items())},
            "t": self.t,
            "certificate": 2**self.t,
            "moves": self.move_count,
            "outcome": self.outcome,
            "pending": {
                "var": self.pending_var,
                "options": list(self.pending_options or ()),
            }
            if self.phase == "await_choice"
            else None,
        }


def _variables_payload(problem: str, n: int) -> list[dict]:
    if problem == "arrows":
        return [
            {"id": arrows.cell_id((col, row), n), "col": col, "row": row}
            for row in range(n)
            for col in range(n)
        ]
    return [
        {"id": i, "x": v[0], "y": v[1]}
        for i, v in enumerate(sperner.vertices(n))
    ]


class SessionStore:
    def __init__(self, snapshot_dir: Optional[str] = None, ttl: float = DEFAULT_TTL,
                 max_n: int = 256):
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.snapshot_dir = snapshot_dir
        self.ttl = ttl
        self.max_n = max_n
        if snapshot_dir:
            os.makedirs(snapshot_dir, exist_ok=True)
            self._load_snapshots()

    def create(self, problem: str, n: int) -> Session:
        if problem not in ("arrows", "sperner"):
            raise ApiError(400, f"unknown problem {problem!r}")
        if not isinstance(n, int) or n < 2 or n > self.max_n:
            raise ApiError(400, f"n must be an integer in [2, {self.max_n}]")
        try:
            bob = game.bob_for(problem, n)
        except Exception as e:
            raise ApiError(400, f"cannot start adversary: {e}") from None
        checker = game.problem_for(problem, n)
        session = Session(
            id=secrets.token_hex(8),
            problem=problem,
            n=n,
            bob=bob,
            checker=checker,
            board=dict(bob.board()),
        )
        with self._lock:
            self._evict_locked()
            self.sessions[session.id] = session
        self._snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"no session {session_id}")
        session.last_active = time.time()
        return session

    def _evict_locked(self) -> None:
        cutoff = time.time() - self.ttl
        for sid in [s for s, sess in self.sessions.items() if sess.last_active < cutoff]:
            del self.sessions[sid]

    # ------------------------------------------------------------ snapshots

    def _snapshot_path(self, sid: str) -> str:
        return os.path.join(self.snapshot_dir, f"{sid}.json")

    def _snapshot(self, session: Session) -> None:
        if not self.snapshot_dir:
            return
        payload = {
            "id": session.id,
            "problem": session.problem,
            "n": session.n,
            "phase": session.phase,
            "pending_var": session.pending_var,
            "pending_options": list(session.pending_options or ()),
            "outcome": session.outcome,
            "move_count": session.move_count,
            "bob": _dump_bob(session.bob),
        }
        path = self._snapshot_path(session.id)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)

    def _load_snapshots(self) -> None:
        for name in os.listdir(self.snapshot_dir):
            if not name.endswith(".json"):
                continue
            try:
                with open(os.path.join(self.snapshot_dir, name), encoding="utf-8") as fh:
                    payload = json.load(fh)
                session = _restore_session(payload)
                self.sessions[session.id] = session
            except Exception:
                continue  # stale or corrupt snapshot: skip

    def save(self, session: Session) -> None:
        self._snapshot(session)


def _dump_bob(bob) -> dict:
    if isinstance(bob, game.ArrowsBob):
        st = bob.state
        return {
            "kind": "arrows",
            "n": st.n,
            "grid": [[c, r, d] for (c, r), d in sorted(st.grid.items())],
            "buffer_col0": st.buffer_col0,
            "conceded": st.conceded,
            "choose_any_count": st.choose_any_count,
            "choose_any_cells": [list(c) for c in st.choose_any_cells],
            "pending": _dump_arrows_pending(st.pending),
        }
    st = bob.state
    return {
        "kind": "sperner",
        "n": st.n,
        "coloring": [[x, y, c] for (x, y), c in sorted(st.coloring.items())],
        "path": [list(v) for v in st.path],
        "conceded": st.conceded,
        "choose_any_count": st.choose_any_count,
        "pending": dict(st.pending, cell=list(st.pending["cell"]))
        if st.pending
        else None,
        "fallback": st.fallback,
    }


def _dump_arrows_pending(pending):
    if pending is None:
        return None
    out = {"case": pending["case"], "cell": list(pending["cell"]),
           "options": list(pending["options"])}
    for key in ("p1", "p2"):
        if key in pending:
            out[key] = [[c, r, d] for (c, r), d in sorted(pending[key].items())]
    return out


def _restore_session(payload: dict) -> Session:
    problem, n = payload["problem"], payload["n"]
    data = payload["bob"]
    if data["kind"] == "arrows":
        bob = game.ArrowsBob.__new__(game.ArrowsBob)
        bob.n = n
        state = arrows.BobArrowsState(n=n)
        state.grid = {(c, r): d for c, r, d in data["grid"]}
        state.buffer_col0 = data["buffer_col0"]
        state.conceded = data["conceded"]
        state.choose_any_count = data["choose_any_count"]
        state.choose_any_cells = [tuple(c) for c in data["choose_any_cells"]]
        pend = data["pending"]
        if pend:
            state.pending = {
                "case": pend["case"],
                "cell": tuple(pend["cell"]),
                "options": tuple(pend["options"]),
            }
            for key in ("p1", "p2"):
                if key in pend:
                    state.pending[key] = {(c, r): d for c, r, d in pend[key]}
        bob.state = state
    else:
        bob = game.SpernerBob.__new__(game.SpernerBob)
        bob.n = n
        state = sperner.BobSpernerState(n=n)
        state.coloring = {(x, y): c for x, y, c in data["coloring"]}
        state.path = [tuple(v) for v in data["path"]]
        state.conceded = data["conceded"]
        state.choose_any_count = data["choose_any_count"]
        state.fallback = data["fallback"]
        if data["pending"]:
            pend = dict(data["pending"])
            pend["cell"] = tuple(pend["cell"])
            pend["options"] = tuple(pend["options"])
            state.pending = pend
        bob.state = state
        bob._ids = sperner.vertex_ids(n)
        bob._vertices = sperner.vertices(n)
    session = Session(
        id=payload["id"],
        problem=problem,
        n=n,
        bob=bob,
        checker=game.problem_for(problem, n),
        board=dict(bob.board()),
        phase=payload["phase"],
        pending_var=payload["pending_var"],
        pending_options=tuple(payload["pending_options"]) or None,
        outcome=payload["outcome"],
        move_count=payload["move_count"],
    )
    return session


# ---------------------------------------------------------------- gameplay


def _absorb_board(session: Session) -> Optional[tuple]:
    """Pull the adversary's revealed values and referee them."""
    new_board = dict(session.bob.board())
    changed = [v for v in new_board if v not in session.board]
    session.board = new_board
    return session.checker.falsified_by(new_board, changed)


def _finish(session: Session, outcome: dict) -> None:
    session.phase = "terminal"
    session.outcome = outcome
    session.pending_var = None
    session.pending_options = None


def handle_query(session: Session, var) -> dict:
    if session.phase != "await_query":
        raise ApiError(409, f"cannot query in phase {session.phase}")
    if not isinstance(var, int) or not (0 <= var < session.checker.num_vars):
        raise ApiError(400, f"bad variable {var!r}")
    if var in session.board:
        return {"kind": "fixed", "value": session.board[var], "board_delta": {},
                "t": session.t, "phase": session.phase}
    session.move_count += 1
    before = set(session.board)
    result = session.bob.answer(var)
    kind = result[0]
    if kind == "conceded":
        _absorb_board(session)
        _finish(session, {"kind": "conceded"})
        return {"kind": "terminal", "outcome": session.outcome, "t": session.t,
                "phase": session.phase}
    if kind == "fixed":
        hit = _absorb_board(session)
        delta = {str(v): session.board[v] for v in session.board if v not in before}
        if hit is not None:
            _finish(session, {"kind": "falsified",
                              "literals": [list(l) for l in hit]})
            return {"kind": "terminal", "outcome": session.outcome,
                    "board_delta": delta, "t": session.t, "phase": session.phase}
        return {"kind": "fixed", "value": result[1], "board_delta": delta,
                "t": session.t, "phase": session.phase}
    session.phase = "await_choice"
    session.pending_var = var
    session.pending_options = tuple(result[1])
    return {"kind": "choose", "options": list(session.pending_options),
            "t": session.t, "phase": session.phase}


def handle_choose(session: Session, value) -> dict:
    if session.phase != "await_choice":
        raise ApiError(409, f"cannot choose in phase {session.phase}")
    if not isinstance(value, int) or value not in (session.pending_options or ()):
        raise ApiError(400, f"value {value!r} not among {session.pending_options}")
    before = set(session.board)
    session.bob.on_choice(session.pending_var, value)
    session.phase = "await_query"
    session.pending_var = None
    session.pending_options = None
    hit = _absorb_board(session)
    delta = {str(v): session.board[v] for v in session.board if v not in before}
    if hit is not None:
        _finish(session, {"kind": "falsified", "literals": [list(l) for l in hit]})
        return {"kind": "terminal", "outcome": session.outcome,
                "board_delta": delta, "t": session.t, "phase": session.phase}
    if session.bob.conceded:
        _finish(session, {"kind": "conceded"})
        return {"kind": "terminal", "outcome": session.outcome,
                "board_delta": delta, "t": session.t, "phase": session.phase}
    return {"kind": "ok", "board_delta": delta, "t": session.t,
            "certificate": 2**session.t, "phase": session.phase}


# ---------------------------------------------------------------- handler


_GAME_RE = re.compile(r"^/api(?:/v1)?/game/([0-9a-f]+)(/query|/choose)?$")
_CREATE_RE = re.compile(r"^/api(?:/v1)?/game$")
_HEALTH_RE = re.compile(r"^/api(?:/v1)?/health$")


def make_handler(store: SessionStore, static_dir: Optional[str]):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                data = json.loads(raw)
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON") from None
            if not isinstance(data, dict):
                raise ApiError(400, "request body must be a JSON object")
            return data

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            try:
                if _HEALTH_RE.match(self.path):
                    return self._send(200, {"version": __version__, "ok": True})
                m = _GAME_RE.match(self.path)
                if m and not m.group(2):
                    session = store.get(m.group(1))
                    with session.lock:
                        return self._send(200, session.public_state())
                return self._static()
            except ApiError as e:
                return self._send(e.status, {"error": e.message})

        def do_POST(self):
            try:
                if _CREATE_RE.match(self.path):
                    data = self._body()
                    session = store.create(data.get("problem"), data.get("n"))
                    payload = {
                        "game_id": session.id,
                        "problem": session.problem,
                        "n": session.n,
                        "k": 8 if session.problem == "arrows" else 3,
                        "glyphs": list(arrows.OCTANT_GLYPHS)
                        if session.problem == "arrows"
                        else list(sperner.COLOR_NAMES),
                        "variables": _variables_payload(session.problem, session.n),
                        "board": {str(v): c for v, c in sorted(session.board.items())},
                    }
                    return self._send(200, payload)
                m = _GAME_RE.match(self.path)
                if m and m.group(2):
                    session = store.get(m.group(1))
                    data = self._body()
                    with session.lock:
                        if m.group(2) == "/query":
                            payload = handle_query(session, data.get("var"))
                        else:
                            payload = handle_choose(session, data.get("value"))
                        store.save(session)
                    return self._send(200, payload)
                raise ApiError(404, f"no route {self.path}")
            except ApiError as e:
                return self._send(e.status, {"error": e.message})

        def _static(self):
            if not static_dir:
                raise ApiError(404, f"no route {self.path}")
            rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
            path = os.path.normpath(os.path.join(static_dir, rel))
            if not path.startswith(os.path.abspath(static_dir) + os.sep) and \
                    path != os.path.abspath(static_dir):
                raise ApiError(404, "outside static root")
            if os.path.isdir(path):
                path = os.path.join(path, "index.html")
            if not os.path.isfile(path):
                raise ApiError(404, f"no file {rel}")
            ctype = {
                ".html": "text/html",
                ".js": "text/javascript",
                ".css": "text/css",
                ".svg": "image/svg+xml",
                ".png": "image/png",
            }.get(os.path.splitext(path)[1], "application/octet-stream")
            with open(path, "rb") as fh:
                body = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

    return Handler


def make_server(port: int = 0, static_dir: Optional[str] = None,
                snapshot_dir: Optional[str] = None, max_n: int = 256,
                ttl: float = DEFAULT_TTL):
    store = SessionStore(snapshot_dir=snapshot_dir, ttl=ttl, max_n=max_n)
    if static_dir:
        static_dir = os.path.abspath(static_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(store, static_dir))
    server.store = store  # type: ignore[attr-defined]
    return server


def serve(port: int, static_dir: Optional[str] = None,
          snapshot_dir: Optional[str] = None, max_n: int = 256) -> None:
    server = make_server(port, static_dir, snapshot_dir, max_n)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
