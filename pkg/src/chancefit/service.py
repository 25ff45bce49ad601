"""HTTP facade over the elicitation engine for live sessions.

Sessions are persisted to a store directory, one JSON document per id,
written atomically after every mutation; restarting the service
reproduces every session from disk.  Mutations take a per-session lock
so concurrent answers apply in some serial order, none lost and none
double-applied.  Estimation runs on demand (on the utility endpoint and
at completion), not on every answer.

Field names are part of the wire contract and documented in README.md.
"""

from __future__ import annotations

import os
import threading
import uuid
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import io as cfio
from .elicitation import (
    AlreadyAnsweredError,
    EstimationFailedError,
    EstimationSettings,
    GambleLockedError,
    GambleSpec,
    Session,
    UnknownGambleError,
    compute_session_utilities,
    create_session,
    next_gamble,
    record_choice,
)


class CreateSessionRequest(BaseModel):
    c_grid: list[float] = Field(min_length=1)
    p_grid: list[float] = Field(min_length=1)
    mode: Literal["end_point", "adjacent", "mixed"]
    seed: int = 0
    adjacent_p_grid: list[float] | None = None
    method: Literal["mle", "bayes"] = "mle"
    client_token: str | None = None


class AnswerRequest(BaseModel):
    gamble_id: str
    y: int


_TOKEN_NAMESPACE = uuid.UUID("e5a63f3e-14a1-4c35-9f67-6f4c4d9f0001")


class SessionStore:
    """Directory-backed session map with per-session locks."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def exists(self, session_id: str) -> bool:
        return session_id in self._sessions or self._path(session_id).exists()

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        session = cfio.load_session(path)
        self._sessions[session_id] = session
        return session

    def save(self, session: Session) -> None:
        self._sessions[session.id] = session
        cfio.save_session(self._path(session.id), session)


def _gamble_json(spec: GambleSpec) -> dict:
    return {
        "id": spec.id,
        "c": spec.c,
        "p": spec.p,
        "prize_hi": spec.prize_hi,
        "prize_lo": spec.prize_lo,
        "kind": spec.kind,
    }


def _progress_json(session: Session) -> dict:
    return {"answered": session.answered_count, "total": session.total_gambles}


def _curve_json(points) -> list[dict]:
    return [
        {
            "c": pt.c,
            "u": pt.u,
            "omega": pt.omega,
            "disposition": pt.disposition,
            "method": pt.method,
            "at_bound": pt.at_bound,
        }
        for pt in points
    ]


def build_app(store_dir: str | os.PathLike) -> FastAPI:
    app = FastAPI(title="chancefit session service")
    store = SessionStore(store_dir)

    def _load(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create(req: CreateSessionRequest) -> dict:
        if req.client_token:
            session_id = uuid.uuid5(_TOKEN_NAMESPACE, req.client_token).hex
            if store.exists(session_id):
                with store.lock(session_id):
                    session = _load(session_id)
                    gamble = next_gamble(session)
                return {
                    "session_id": session.id,
                    "created": False,
                    "gamble": _gamble_json(gamble) if gamble else None,
                    "progress": _progress_json(session),
                }
        else:
            session_id = uuid.uuid4().hex
        try:
            session = create_session(
                c_grid=req.c_grid,
                p_grid=req.p_grid,
                mode=req.mode,
                seed=req.seed,
                adjacent_p_grid=req.adjacent_p_grid,
                settings=EstimationSettings(method=req.method),
                session_id=session_id,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with store.lock(session.id):
            store.save(session)
        gamble = next_gamble(session)
        return {
            "session_id": session.id,
            "created": True,
            "gamble": _gamble_json(gamble) if gamble else None,
            "progress": _progress_json(session),
        }

    @app.get("/sessions/{session_id}/next")
    def get_next(session_id: str) -> dict:
        with store.lock(session_id):
            session = _load(session_id)
            try:
                if session.is_complete():
                    points = compute_session_utilities(session)
                    store.save(session)
                    return {
                        "complete": True,
                        "curve": _curve_json(points),
                        "progress": _progress_json(session),
                    }
                gamble = next_gamble(session)
            except EstimationFailedError as exc:
                raise HTTPException(status_code=500, detail=str(exc))
            return {
                "complete": False,
                "gamble": _gamble_json(gamble) if gamble else None,
                "progress": _progress_json(session),
            }

    @app.post("/sessions/{session_id}/answers")
    def answer(session_id: str, req: AnswerRequest) -> dict:
        if req.y not in (0, 1):
            raise HTTPException(status_code=422, detail=f"y must be 0 or 1, got {req.y}")
        with store.lock(session_id):
            session = _load(session_id)
            if session.is_complete():
                raise HTTPException(status_code=409, detail="session is already complete")
            try:
                record_choice(session, req.gamble_id, req.y)
            except UnknownGambleError:
                raise HTTPException(
                    status_code=404, detail=f"no gamble {req.gamble_id} in this session"
                )
            except AlreadyAnsweredError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except GambleLockedError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except EstimationFailedError as exc:
                # The answer itself was recorded; the bootstrap estimate it
                # triggered is what failed.  Persist before reporting.
                store.save(session)
                raise HTTPException(status_code=500, detail=str(exc))
            store.save(session)
            return {"recorded": True, "progress": _progress_json(session)}

    @app.get("/sessions/{session_id}/utility")
    def utility(session_id: str, method: Literal["mle", "bayes"] | None = None) -> dict:
        with store.lock(session_id):
            session = _load(session_id)
            if session.answered_count == 0:
                return {
                    "points": [],
                    "reason": "no answers recorded yet; utilities exist only for "
                    "sure values with at least one answer",
                }
            try:
                points = compute_session_utilities(session, method=method)
            except EstimationFailedError as exc:
                raise HTTPException(status_code=500, detail=str(exc))
            store.save(session)
            return {"points": _curve_json(points)}

    @app.get("/sessions/{session_id}")
    def export(session_id: str) -> dict:
        with store.lock(session_id):
            session = _load(session_id)
            return cfio.session_to_document(session)

    return app
