"""Session-based HTTP API for human-driven move sequences.

In-memory sessions wrap the dynamics/solver modules: apply a move, inspect
the refreshed profile and hints, undo, ask for a suggestion, or export the
instance plus history in the CLI file formats. All numbers travel as exact
rational strings with decimal mirrors.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from fractions import Fraction

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import dynamics, exact, search
from .graphs import Graph, InstanceError, WaterProfile, dump_instance, load_instance
from .rationals import decimal_str, exact_str

HISTORY_CAP = 10_000
SUGGEST_BUDGET_SECONDS = 0.2
GLA_EXACT_LIMIT = 20


class CreateSessionRequest(BaseModel):
    instance: dict
    target: str


class MoveRequest(BaseModel):
    edge: list | None = None
    macro: list | None = None
    mu: str = "1/2"


@dataclass
class Session:
    id: str
    graph: Graph
    initial: WaterProfile
    target: int
    history: list[dynamics.Move] = field(default_factory=list)
    current: WaterProfile = None  # type: ignore[assignment]
    seq: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    kappa_hint: exact.KappaResult | None = None

    def __post_init__(self):
        if self.current is None:
            self.current = self.initial
        self.kappa_hint = exact.kappa_closed_form(self.initial, self.target)


def _rational(x: Fraction) -> dict:
    return {"exact": exact_str(x), "decimal": decimal_str(x)}


def _hints(session: Session) -> dict:
    g, profile = session.graph, session.current
    provenance = "exact"
    try:
        animal = exact.gla(g, profile, session.target, cap=GLA_EXACT_LIMIT)
    except exact.EnumerationCapExceeded:
        animal = exact.gla(g, profile, session.target, mode="greedy")
        provenance = "heuristic"
    bound = search.upper_bound(g, profile, session.target)
    hints = {
        "gla": {
            "set": [g.name_of(u) for u in animal.subset],
            "value": _rational(animal.value),
            "exact": animal.exact,
        },
        "upper_bound": _rational(bound),
        "kappa": None,
        "kappa_solver": None,
        "progress_ratio": None,
        "provenance": provenance,
    }
    if session.kappa_hint is not None:
        hints["kappa"] = _rational(session.kappa_hint.value)
        hints["kappa_solver"] = session.kappa_hint.solver
        if session.kappa_hint.value > 0:
            ratio = profile.levels[session.target] / session.kappa_hint.value
            hints["progress_ratio"] = _rational(ratio)
    return hints


def _state(session: Session) -> dict:
    g = session.graph
    return {
        "id": session.id,
        "seq": session.seq,
        "capacity": _rational(session.current.capacity),
        "target": g.name_of(session.target),
        "vertices": [
            {"id": g.name_of(u), "level": _rational(session.current.levels[u])}
            for u in range(g.n)
        ],
        "edges": [[g.name_of(u), g.name_of(w)] for u, w in g.edges()],
        "history_length": len(session.history),
        "level_at_target": _rational(session.current.levels[session.target]),
        "hints": _hints(session),
    }


def _suggest(session: Session) -> dict:
    """Advisory next move; never mutates.

    On solved graph classes the current state's exact certificate leads the
    way (one-step greedy provably stalls below the optimum on complete graphs
    of rank four and above); elsewhere the hint is the pooling move that
    maximizes the level at the target after a hypothetical final best-animal
    average, computed within a time budget.
    """
    g, profile, v = session.graph, session.current, session.target
    bound = search.upper_bound(g, profile, v)
    if profile.levels[v] == bound:
        return {"action": "stop", "reason": "target already at the upper bound"}
    closed = exact.kappa_closed_form(profile, v)
    if closed is not None:
        if not closed.certificate:
            return {"action": "stop", "reason": "target already at the exact optimum"}
        move = closed.certificate[0]
        return {
            "action": "move",
            "move": dynamics.moves_to_json(g, [move])[0],
            "expected_score": _rational(closed.value),
            "provenance": "exact-certificate",
        }
    t0 = time.monotonic()
    provenance = "exact"
    from .graphs import all_connected_subsets

    candidates = all_connected_subsets(g, 2, min(g.n, 6))
    levels = profile.levels
    try:
        baseline = exact.gla(g, profile, v, cap=GLA_EXACT_LIMIT).value
    except exact.EnumerationCapExceeded:
        baseline = exact.gla(g, profile, v, mode="greedy").value
        provenance = "heuristic"
    best_key = None
    best_set = None
    for s in candidates:
        if time.monotonic() - t0 > SUGGEST_BUDGET_SECONDS:
            provenance = "heuristic"
            break
        mean = sum((levels[u] for u in s), Fraction(0)) / len(s)
        after = list(levels)
        for u in s:
            after[u] = mean
        try:
            score = exact.gla(g, profile.with_levels(after), v, cap=GLA_EXACT_LIMIT).value
        except exact.EnumerationCapExceeded:
            score = exact.gla(g, profile.with_levels(after), v, mode="greedy").value
            provenance = "heuristic"
        key = (-score, len(s), s)  # highest score, then smallest set, then lex
        if best_key is None or key < best_key:
            best_key = key
            best_set = s
    if best_set is None or -best_key[0] <= baseline:
        return {"action": "stop", "reason": "no improving pooling move found"}
    move = (
        dynamics.Move.single(best_set[0], best_set[1])
        if len(best_set) == 2
        else dynamics.Move.macro_over(g, best_set)
    )
    return {
        "action": "move",
        "move": dynamics.moves_to_json(g, [move])[0],
        "expected_score": _rational(-best_key[0]),
        "provenance": provenance,
    }


def create_app() -> FastAPI:
    app = FastAPI(title="watertransport explorer", version="0.1.0")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.get("/")
    def root():
        return {"service": "watertransport-explorer", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        import json as _json

        try:
            graph, profile = load_instance(_json.dumps(req.instance))
            target = graph.id_of(req.target)
        except InstanceError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = Session(id=uuid.uuid4().hex, graph=graph, initial=profile, target=target)
        sessions[session.id] = session
        return _state(session)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return _state(get_session(session_id))

    @app.post("/sessions/{session_id}/moves")
    def post_move(session_id: str, req: MoveRequest):
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="concurrent mutation in progress")
        try:
            if len(session.history) >= HISTORY_CAP:
                raise HTTPException(status_code=409, detail="history cap reached")
            doc = req.model_dump(exclude_none=True)
            try:
                move = dynamics.moves_from_json(session.graph, [doc])[0]
                new_profile = dynamics.apply_move(session.current, move)
            except dynamics.InvalidMoveError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            session.history.append(move)
            session.current = new_profile
            session.seq += 1
            return _state(session)
        finally:
            session.lock.release()

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="concurrent mutation in progress")
        try:
            if not session.history:
                raise HTTPException(status_code=409, detail="history is empty")
            session.history.pop()
            session.current = dynamics.apply_sequence(session.initial, session.history)
            session.seq += 1
            return _state(session)
        finally:
            session.lock.release()

    @app.get("/sessions/{session_id}/suggest")
    def suggest(session_id: str):
        return _suggest(get_session(session_id))

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        import json as _json

        session = get_session(session_id)
        return {
            "instance": _json.loads(dump_instance(session.graph, session.initial)),
            "target": session.graph.name_of(session.target),
            "moves": dynamics.moves_to_json(session.graph, session.history),
        }

    return app


app = create_app()
