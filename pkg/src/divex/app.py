"""HTTP + WebSocket API over the engine.

JSON endpoints for health, maps, shots, searches, history, tasks and reports;
a WebSocket per collaboration session carrying the collab wire messages; and
a read-only spectator snapshot endpoint.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import collab, taskserver
from .corpus import shot_view
from .engine import Engine
from .errors import (
    DivexError,
    UnknownKeyframe,
    UnknownSession,
    UnknownTask,
    UnknownVideo,
)
from .search import ResultSet
from .som import feature_map_to_dict

_NOT_FOUND = (UnknownVideo, UnknownKeyframe, UnknownSession, UnknownTask)


def result_set_payload(results: ResultSet | None) -> dict | None:
    if results is None:
        return None
    return {
        "feature": results.query.feature,
        "parameters": results.query.params,
        "issued_at_ms": results.query.issued_at_ms,
        "entries": [{"keyframe": kf_id, "score": score} for kf_id, score in results.entries],
    }


def keyframe_payload(engine: Engine, kf_id: str) -> dict:
    kf = engine.corpus.keyframes[kf_id]
    return {
        "id": kf.id,
        "video": kf.video_id,
        "shot_index": kf.shot_index,
        "timestamp_s": kf.timestamp_s,
        "spatial_grid": None if kf.spatial_grid is None else [int(v) for v in kf.spatial_grid],
        "concepts": kf.concepts,
    }


class SessionCreate(BaseModel):
    user: str = "anonymous"
    role: str = "novice"


class ConceptSearchRequest(BaseModel):
    session: str
    query: str
    theta: float = 0.5
    limit: int = 20


class ColorFilterRequest(BaseModel):
    session: str
    colors: list[int | str]
    coverage_theta: float = 0.15


class SimilarityRequest(BaseModel):
    session: str
    probe: str
    k: int = 20
    space: str = "color"


class SketchRequest(BaseModel):
    session: str
    cells: dict[str, int]
    min_match: int = 1


class ShotFilterRequest(BaseModel):
    session: str
    video: str


class SessionRef(BaseModel):
    session: str


class UsageRequest(BaseModel):
    session: str
    feature: str


class TaskStartRequest(BaseModel):
    at: float | None = None


class SubmitRequest(BaseModel):
    session: str
    video: str
    shot_index: int
    timestamp_sec: float
    at_sec: float | None = Field(default=None, description="override for scripted replay")


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="divex", version="0.1.0")
    rooms_ws: dict[str, set[WebSocket]] = {}

    # the browser client is a separate origin during development
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    static_dir = getattr(engine.config, "static_dir", None)
    if static_dir and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    @app.exception_handler(DivexError)
    async def divex_error_handler(_: Request, exc: DivexError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        return JSONResponse(
            status_code=status, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(_: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "videos": len(engine.corpus.videos),
            "keyframes": len(engine.corpus.keyframes),
            "maps": len(engine.catalog),
            "tasks": len(engine.tasks),
        }

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        session = engine.create_session(user=body.user, role=body.role)
        return {"session": session.token, "user": session.user, "role": session.role}

    # -- maps ----------------------------------------------------------------

    def _map_summary(map_id: str) -> dict:
        fmap = engine.catalog.maps[map_id]
        return {
            "id": fmap.id,
            "title": fmap.title,
            "kind": fmap.kind,
            "concept_label": fmap.concept_label,
            "members": fmap.member_count,
        }

    @app.get("/maps")
    def list_maps(query: str | None = None, session: str | None = None):
        if query is None:
            ids = list(engine.catalog.maps)
        else:
            ids = engine.map_search(query, token=session)
        return {"maps": [_map_summary(map_id) for map_id in ids]}

    @app.get("/maps/{map_id}")
    def get_map(map_id: str, weights: bool = False):
        fmap = engine.catalog.maps.get(map_id)
        if fmap is None:
            return JSONResponse(status_code=404, content={"error": "UnknownMap", "detail": map_id})
        return feature_map_to_dict(fmap, include_weights=weights)

    # -- corpus ----------------------------------------------------------------

    @app.get("/videos/{video_id}/shots")
    def video_shots(video_id: str):
        pairs = shot_view(engine.corpus, video_id)
        return {
            "video": video_id,
            "shots": [
                {
                    "index": shot.shot_index,
                    "start_frame": shot.start_frame,
                    "end_frame": shot.end_frame,
                    "keyframe": keyframe_payload(engine, kf.id),
                }
                for shot, kf in pairs
            ],
        }

    @app.get("/keyframes/{kf_id}")
    def get_keyframe(kf_id: str):
        if kf_id not in engine.corpus.keyframes:
            raise UnknownKeyframe(kf_id)
        return keyframe_payload(engine, kf_id)

    # -- search ----------------------------------------------------------------

    @app.post("/search/concept")
    def search_concept(body: ConceptSearchRequest):
        results = engine.dispatch_search(
            body.session,
            "concept_search",
            {"query": body.query, "theta": body.theta, "limit": body.limit},
        )
        return result_set_payload(results)

    @app.post("/search/color")
    def search_color(body: ColorFilterRequest):
        results = engine.dispatch_search(
            body.session,
            "color_filter",
            {"colors": body.colors, "coverage_theta": body.coverage_theta},
        )
        return result_set_payload(results)

    @app.post("/search/similarity")
    def search_similarity(body: SimilarityRequest):
        results = engine.dispatch_search(
            body.session,
            "similarity_search",
            {"probe": body.probe, "k": body.k, "space": body.space},
        )
        return result_set_payload(results)

    @app.post("/search/sketch")
    def search_sketch(body: SketchRequest):
        results = engine.dispatch_search(
            body.session, "sketch", {"cells": body.cells, "min_match": body.min_match}
        )
        return result_set_payload(results)

    @app.post("/search/shot-filter")
    def search_shot_filter(body: ShotFilterRequest):
        results = engine.dispatch_search(body.session, "shot_filter", {"video": body.video})
        return result_set_payload(results)

    @app.post("/history/back")
    def history_back(body: SessionRef):
        return {"results": result_set_payload(engine.history_back(body.session))}

    @app.get("/similarity-tab")
    def similarity_tab(session: str):
        return {"results": result_set_payload(engine.similarity_tab(session))}

    # -- tasks -----------------------------------------------------------------

    @app.get("/tasks")
    def list_tasks():
        return {
            "tasks": [taskserver.task_to_dict(t) for t in engine.tasks.values()],
            "active": engine.active_task_id,
        }

    @app.post("/tasks/{task_id}/start")
    def start_task(task_id: str, body: TaskStartRequest | None = None):
        run = engine.start_task(task_id, at=body.at if body else None)
        return {"task": task_id, "started_at": run.started_at}

    @app.post("/tasks/{task_id}/submit")
    def submit(task_id: str, body: SubmitRequest):
        judgment = engine.submit(
            body.session,
            task_id,
            body.video,
            body.shot_index,
            body.timestamp_sec,
            at_sec=body.at_sec,
        )
        return {"verdict": judgment.verdict, "score_delta": judgment.score_delta}

    @app.post("/usage")
    def record_usage(body: UsageRequest):
        recorded = engine.record_manual_usage(body.session, body.feature)
        return {"recorded": recorded}

    @app.get("/reports/usage")
    def usage_report(format: str = "json"):
        report = engine.usage_report()
        if format == "csv":
            return PlainTextResponse(taskserver.report_to_csv(report), media_type="text/csv")
        return {"rows": taskserver.report_rows(report)}

    # -- collaboration -----------------------------------------------------------

    @app.get("/spectator/{session_id}")
    def spectator(session_id: str):
        return engine.spectator(session_id)

    @app.websocket("/collab/{session_id}")
    async def collab_socket(ws: WebSocket, session_id: str):
        await ws.accept()
        peers = rooms_ws.setdefault(session_id, set())
        peers.add(ws)
        try:
            while True:
                text = await ws.receive_text()
                try:
                    doc = json.loads(text)
                    msg = collab.message_from_wire_dict(doc)
                    if msg.session != session_id:
                        raise collab.MalformedWire(
                            f"message session {msg.session!r} does not match socket"
                        )
                except DivexError as exc:
                    await ws.send_json(
                        {"kind": "error", "error": type(exc).__name__, "detail": str(exc)}
                    )
                    continue
                effect, revision = engine.apply_collab(session_id, msg)
                await ws.send_json(
                    {"kind": "ack", "effect": effect.value, "revision": revision}
                )
                if effect is collab.Effect.APPLIED:
                    event = {"kind": "event", "message": doc, "revision": revision}
                    for peer in list(peers):
                        if peer is not ws:
                            try:
                                await peer.send_json(event)
                            except Exception:
                                peers.discard(peer)
        except WebSocketDisconnect:
            pass
        finally:
            peers.discard(ws)

    return app
