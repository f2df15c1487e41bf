"""HTTP facade over the analysis pipeline, model database, and sessions.

Error mapping: unknown ids → 404; a choice that does not fit the session's
current status → 409; labels outside the taxonomy or malformed inputs → 422.
Mutating endpoints accept an optional ``request_token``; retrying with the
same token replays the original response instead of repeating the effect.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from usagekit.errors import (
    AdapterError,
    InvalidChoice,
    NoMatchingState,
    NoModelForUsage,
    NoRecommendation,
    UnknownCategory,
)
from usagekit.generate.session import (
    SessionStatus,
    choose_screen,
    choose_widget,
    provide_text,
    save_script,
    session_script,
    start_session,
)
from usagekit.irmodel.store import serialize_model
from usagekit.service.runtime import (
    GenSessionBox,
    Runtime,
    ServiceConfig,
    ServiceError,
)


def _event_view(e) -> dict:
    return {
        "screen": e.screen,
        "widget_id": e.widget_id,
        "box": [e.widget_box.x, e.widget_box.y, e.widget_box.w, e.widget_box.h],
        "widget_text": e.widget_text,
        "canonical": e.widget_canonical,
        "action": e.action.value,
        "text": e.text,
    }


def _session_view(runtime: Runtime, box: GenSessionBox) -> dict:
    s = box.session
    view = {
        "session_id": s.session_id,
        "usage_id": s.usage_id,
        "status": s.status.value,
        "screenshot_ref": box.screenshot_ref,
        "screen_suggestions": [
            {"label": x.name, "confidence": x.confidence}
            for x in s.screen_suggestions
        ],
        "recommendations": [
            {
                "widget_id": r.wid,
                "category": r.category,
                "tier": r.tier,
                "confidence": r.confidence,
                "term_score": r.term_score,
                "box": [r.widget.box.x, r.widget.box.y, r.widget.box.w, r.widget.box.h],
                "text": r.widget.text,
                "action": r.transition.action.value,
            }
            for r in s.recommendations
        ],
        "current_state": s.current_state,
        "events": len(s.events),
        "history": [_event_view(e) for e in s.events],
        "failure_reason": s.failure_reason,
    }
    return view


def create_app(config: ServiceConfig) -> FastAPI:
    runtime = Runtime(config)
    app = FastAPI(title="usagekit service")
    app.state.runtime = runtime

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse({"detail": exc.detail}, status_code=exc.status_code)

    # -- recordings / jobs -------------------------------------------------

    @app.post("/recordings")
    async def post_recording(body: dict):
        rec_dir = body.get("rec_dir")
        if not rec_dir:
            raise ServiceError(422, "body needs rec_dir")

        def run():
            job = runtime.submit_analyze(Path(rec_dir))
            return {"job_id": job.job_id}

        return runtime.idempotent("POST /recordings", body.get("request_token"), run)

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        return runtime.job(job_id).to_dict()

    @app.get("/recordings/{rec_id}/events")
    async def get_events(rec_id: str):
        out = runtime.recording_dir(rec_id)
        return json.loads((out / "events.json").read_text(encoding="utf-8"))

    # -- label sessions ------------------------------------------------------

    @app.post("/label-sessions")
    async def post_label_session(body: dict):
        recording_id = body.get("recording_id")
        usage_id = body.get("usage_id")
        if not recording_id or not usage_id:
            raise ServiceError(422, "body needs recording_id and usage_id")

        def run():
            session = runtime.open_label_session(recording_id, usage_id)
            return {
                "session_id": session.session_id,
                "recording_id": session.recording_id,
                "usage_id": session.usage_id,
                "total": len(session.items),
                "cursor": session.cursor,
            }

        return runtime.idempotent(
            "POST /label-sessions", body.get("request_token"), run
        )

    @app.get("/label-sessions/{session_id}/next")
    async def get_label_next(session_id: str):
        session = runtime.label_session(session_id)
        if session.done:
            return {
                "done": True,
                "cursor": session.cursor,
                "total": len(session.items),
                "model_id": session.model_id,
            }
        item = session.items[session.cursor]
        view = item.to_dict()
        view.update(done=False, cursor=session.cursor, total=len(session.items))
        return view

    @app.post("/label-sessions/{session_id}/choice")
    async def post_label_choice(session_id: str, body: dict):
        session = runtime.label_session(session_id)
        screen_label = body.get("screen_label")
        if not screen_label:
            raise ServiceError(422, "body needs screen_label")

        def run():
            return runtime.apply_label(
                session, screen_label, body.get("widget_label")
            )

        return runtime.idempotent(
            f"POST /label-sessions/{session_id}/choice",
            body.get("request_token"),
            run,
        )

    # -- models ---------------------------------------------------------------

    @app.get("/models")
    async def get_models(usage: Optional[str] = None):
        return [
            {
                "model_id": info.model_id,
                "usage_id": info.usage_id,
                "provenance": [list(p) for p in info.provenance],
            }
            for info in runtime.db.list_models(usage)
        ]

    @app.get("/models/{model_id}", response_class=PlainTextResponse)
    async def get_model(model_id: str):
        try:
            model = runtime.db.load(model_id)
        except KeyError:
            raise ServiceError(404, f"unknown model {model_id!r}") from None
        return serialize_model(model)

    @app.post("/models/merge")
    async def post_merge(body: dict):
        usage_id = body.get("usage_id")
        if not usage_id:
            raise ServiceError(422, "body needs usage_id")

        def run():
            try:
                merged = runtime.db.merged_model(usage_id)
            except NoModelForUsage as exc:
                raise ServiceError(404, str(exc)) from exc
            model_id = runtime.db.store(merged)
            return {"model_id": model_id, "usage_id": usage_id}

        return runtime.idempotent(
            "POST /models/merge", body.get("request_token"), run
        )

    # -- generation sessions ----------------------------------------------------

    @app.post("/gen-sessions")
    async def post_gen_session(body: dict):
        usage_id = body.get("usage_id")
        adapter_ref = body.get("adapter_ref")
        if not usage_id or not adapter_ref:
            raise ServiceError(422, "body needs usage_id and adapter_ref")

        def run():
            classifiers = runtime.classifiers()
            adapter = runtime.build_adapter(adapter_ref)
            try:
                session = start_session(
                    usage_id,
                    adapter,
                    runtime.db,
                    classifiers,
                    k=int(body.get("k", runtime.config.k)),
                    rec_threshold=int(
                        body.get("rec_threshold", runtime.config.rec_threshold)
                    ),
                )
            except NoModelForUsage as exc:
                raise ServiceError(404, str(exc)) from exc
            except AdapterError as exc:
                raise ServiceError(502, str(exc)) from exc
            box = GenSessionBox(session=session)
            runtime.gen_sessions[session.session_id] = box
            runtime.snapshot_screenshot(box)
            return _session_view(runtime, box)

        return runtime.idempotent(
            "POST /gen-sessions", body.get("request_token"), run
        )

    @app.get("/gen-sessions/{session_id}")
    async def get_gen_session(session_id: str):
        return _session_view(runtime, runtime.gen_session(session_id))

    @app.post("/gen-sessions/{session_id}/choice")
    async def post_gen_choice(session_id: str, body: dict):
        box = runtime.gen_session(session_id)
        keys = [k for k in ("screen_label", "widget_id", "text") if k in body]
        if len(keys) != 1:
            raise ServiceError(
                422, "body needs exactly one of screen_label, widget_id, text"
            )
        kind = keys[0]

        def run():
            session = box.session
            with box.lock:
                before = session.device
                try:
                    if kind == "screen_label":
                        choose_screen(session, body["screen_label"])
                    elif kind == "widget_id":
                        choose_widget(session, body["widget_id"])
                    else:
                        provide_text(session, str(body["text"]))
                except UnknownCategory as exc:
                    raise ServiceError(422, str(exc)) from exc
                except NoMatchingState as exc:
                    raise ServiceError(409, str(exc)) from exc
                except InvalidChoice as exc:
                    raise ServiceError(409, str(exc)) from exc
                except NoRecommendation:
                    pass  # session is Failed; the view carries the reason
                except AdapterError as exc:
                    raise ServiceError(502, str(exc)) from exc
                if session.device is not before:
                    runtime.snapshot_screenshot(box)
            return _session_view(runtime, box)

        return runtime.idempotent(
            f"POST /gen-sessions/{session_id}/choice",
            body.get("request_token"),
            run,
        )

    @app.get("/gen-sessions/{session_id}/script")
    async def get_gen_script(session_id: str):
        box = runtime.gen_session(session_id)
        session = box.session
        if session.status is not SessionStatus.COMPLETED:
            raise ServiceError(
                409, f"session is {session.status.value}, not Completed"
            )
        script = session_script(session)
        rel = f"gen/{session.session_id}/script.toml"
        save_script(script, runtime.assets_root / rel)
        return {
            "usage_id": script.usage_id,
            "final_screen": script.final_screen,
            "script_ref": rel,
            "events": [_event_view(e) for e in script.events],
        }

    # -- assets -----------------------------------------------------------------

    @app.get("/assets/{asset_path:path}")
    async def get_asset(asset_path: str):
        root = runtime.assets_root.resolve()
        target = (root / asset_path).resolve()
        if root not in target.parents and target != root:
            raise ServiceError(404, "no such asset")
        if not target.is_file():
            raise ServiceError(404, "no such asset")
        return FileResponse(target)

    # -- web console (optional) ----------------------------------------------

    if config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
