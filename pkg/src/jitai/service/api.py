"""HTTP/JSON wire API over the intervention engine.

POST /sessions                      create a session
POST /sessions/{id}/context         report contexts, receive a suggestion
POST /sessions/{id}/response        answer the pending suggestion
GET  /sessions/{id}/state           posterior means per arm
GET  /admin/snapshot                full persisted state
POST /admin/restore                 replace state from a snapshot
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from ..domain import ActivityContext, Response, SocialContext
from .engine import (
    EngineError,
    InterventionEngine,
    NoPendingError,
    PendingConflictError,
    SessionNotFoundError,
    SnapshotError,
)


class CreateSessionBody(BaseModel):
    user_id: str


class ContextBody(BaseModel):
    activity: str
    social: str


class ResponseBody(BaseModel):
    response: str
    suggestion_id: str | None = None


class RestoreBody(BaseModel):
    snapshot: dict


def create_app(engine: InterventionEngine) -> FastAPI:
    app = FastAPI(title="adaptive intervention service")

    def bad_request(exc: Exception) -> HTTPException:
        return HTTPException(status_code=400, detail=str(exc))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            session = engine.create_session(body.user_id)
        except EngineError as exc:
            raise bad_request(exc)
        return {
            "session_id": session.session_id,
            "user_id": session.user_id,
            "created_at": session.created_at.isoformat(),
        }

    @app.post("/sessions/{session_id}/context")
    def submit_context(session_id: str, body: ContextBody):
        try:
            activity = ActivityContext(body.activity)
            social = SocialContext(body.social)
        except ValueError as exc:
            raise bad_request(exc)
        try:
            suggestion = engine.submit_context(session_id, activity, social)
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except PendingConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except EngineError as exc:
            raise bad_request(exc)
        return suggestion.to_dict()

    @app.post("/sessions/{session_id}/response")
    def submit_response(session_id: str, body: ResponseBody):
        try:
            response = Response(body.response)
        except ValueError:
            raise HTTPException(
                status_code=400, detail=f"unknown response token: {body.response!r}"
            )
        try:
            return engine.submit_response(
                session_id, response, suggestion_id=body.suggestion_id
            )
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except NoPendingError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except EngineError as exc:
            raise bad_request(exc)

    @app.get("/sessions/{session_id}/state")
    def session_state(session_id: str):
        try:
            return engine.session_state(session_id)
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/admin/snapshot")
    def snapshot():
        return engine.snapshot()

    @app.post("/admin/restore")
    def restore(body: RestoreBody):
        try:
            engine.restore(body.snapshot)
        except SnapshotError as exc:
            raise bad_request(exc)
        return {"restored": True, "seq": engine.events and engine.events[-1]["seq"] or 0}

    return app
