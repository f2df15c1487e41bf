"""Shared state behind the HTTP facade: jobs, sessions, stores, assets.

Everything lives under one data root on the filesystem; there is no external
database. Analysis runs on a small worker pool; each session serializes its
own mutations behind a lock. Mutating calls may carry a client token and are
replayed from a response cache when retried with the same token.
"""
from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import cv2
import numpy as np

from usagekit.classify.features import screen_features, widget_features
from usagekit.classify.models import load_model, predict_topk
from usagekit.classify.taxonomy import (
    CanonicalTaxonomy,
    default_taxonomy,
    load_taxonomy,
)
from usagekit.analyze import analyze_recording
from usagekit.errors import UsageKitError
from usagekit.fixtures.apps import load_app
from usagekit.generate.adapter import ExternalProcessAdapter, ScriptedAdapter
from usagekit.generate.session import GenerationSession, SessionClassifiers
from usagekit.gui.abstract import abstract_screen
from usagekit.gui.group import group_elements
from usagekit.gui.segment import segment_screen
from usagekit.gui.textex import GlyphTextExtraction, TextExtraction
from usagekit.gui.types import Box, Widget
from usagekit.irmodel.model import LabeledTrace, TraceStep, build_model
from usagekit.irmodel.store import ModelDb
from usagekit.video.frames import recording_id
from usagekit.video.types import ActionKind

JOB_KINDS = ("Analyze", "Train", "Merge")
JOB_STATUSES = ("Queued", "Running", "Done", "Error")


class ServiceError(UsageKitError):
    """A request that cannot be honored; carries the HTTP status to use."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail


@dataclass
class ServiceConfig:
    data_root: Path
    taxonomy_path: Optional[Path] = None
    screen_model_path: Optional[Path] = None
    widget_model_path: Optional[Path] = None
    k: int = 5
    rec_threshold: int = 5
    workers: int = 2
    ui_dir: Optional[Path] = None  # built web console; served at /ui when set


@dataclass
class JobRecord:
    job_id: str
    kind: str
    status: str = "Queued"
    artifacts: Dict[str, str] = field(default_factory=dict)
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "artifacts": dict(self.artifacts),
            "error": self.error,
        }


@dataclass
class LabelItem:
    """One labeling prompt: an event (screen + widget crop) or the final screen."""

    index: int                      # frame index; -1 for the final-screen item
    kind: str                       # "event" | "final"
    screen_ref: str
    action: str = ""                # action kind value; "" for the final item
    crop_ref: Optional[str] = None  # widget crop; None for swipes and final
    abstract_ref: Optional[str] = None
    widget: Optional[Widget] = None
    screen_suggestions: List[Tuple[str, float]] = field(default_factory=list)
    widget_suggestions: List[Tuple[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "kind": self.kind,
            "screen_ref": self.screen_ref,
            "action": self.action,
            "crop_ref": self.crop_ref,
            "abstract_ref": self.abstract_ref,
            "needs_widget": self.widget is not None,
            "widget_box": (
                [self.widget.box.x, self.widget.box.y,
                 self.widget.box.w, self.widget.box.h]
                if self.widget is not None else None
            ),
            "widget_text": self.widget.text if self.widget is not None else "",
            "screen_suggestions": [
                {"label": n, "confidence": c} for n, c in self.screen_suggestions
            ],
            "widget_suggestions": [
                {"label": n, "confidence": c} for n, c in self.widget_suggestions
            ],
        }


@dataclass
class LabelSession:
    session_id: str
    recording_id: str
    usage_id: str
    items: List[LabelItem]
    cursor: int = 0
    labels: List[Tuple[str, Optional[str]]] = field(default_factory=list)
    model_id: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.items)


@dataclass
class GenSessionBox:
    session: GenerationSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    shots: int = 0
    screenshot_ref: str = ""


class Runtime:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_root = Path(config.data_root)
        self.assets_root = self.data_root / "assets"
        self.assets_root.mkdir(parents=True, exist_ok=True)
        (self.data_root / "jobs").mkdir(parents=True, exist_ok=True)
        self.taxonomy: CanonicalTaxonomy = (
            load_taxonomy(config.taxonomy_path)
            if config.taxonomy_path
            else default_taxonomy()
        )
        self.extractor: TextExtraction = GlyphTextExtraction()
        self.db = ModelDb(self.data_root / "models")
        self.jobs: Dict[str, JobRecord] = {}
        self.label_sessions: Dict[str, LabelSession] = {}
        self.gen_sessions: Dict[str, GenSessionBox] = {}
        self._jobs_lock = threading.Lock()
        self._token_cache: Dict[Tuple[str, str], dict] = {}
        self._token_lock = threading.Lock()
        self._classifiers: Optional[SessionClassifiers] = None
        self.pool = ThreadPoolExecutor(max_workers=config.workers)
        self._load_jobs()

    # -- idempotency -------------------------------------------------------

    def idempotent(self, endpoint: str, token: Optional[str], compute) -> dict:
        """Replay the cached response when the same token retries the call."""
        if not token:
            return compute()
        key = (endpoint, token)
        with self._token_lock:
            if key in self._token_cache:
                return self._token_cache[key]
        response = compute()
        with self._token_lock:
            self._token_cache.setdefault(key, response)
            return self._token_cache[key]

    # -- classifiers ---------------------------------------------------------

    def classifiers(self) -> SessionClassifiers:
        if self._classifiers is None:
            screen_path = self.config.screen_model_path or (
                self.data_root / "classifiers" / "screen.model"
            )
            widget_path = self.config.widget_model_path or (
                self.data_root / "classifiers" / "widget.model"
            )
            for path in (screen_path, widget_path):
                if not Path(path).is_file():
                    raise ServiceError(
                        503, f"classifier model not available: {path}"
                    )
            screen_model = load_model(screen_path)
            widget_model = load_model(widget_path)
            self._classifiers = SessionClassifiers(
                screen_model, widget_model, self.taxonomy, self.extractor
            )
        return self._classifiers

    def try_classifiers(self) -> Optional[SessionClassifiers]:
        try:
            return self.classifiers()
        except ServiceError:
            return None

    # -- jobs ----------------------------------------------------------------

    def _job_path(self, job_id: str) -> Path:
        return self.data_root / "jobs" / f"{job_id}.json"

    def _load_jobs(self) -> None:
        for p in sorted((self.data_root / "jobs").glob("*.json")):
            data = json.loads(p.read_text(encoding="utf-8"))
            self.jobs[data["job_id"]] = JobRecord(**data)

    def _save_job(self, job: JobRecord) -> None:
        self._job_path(job.job_id).write_text(
            json.dumps(job.to_dict(), indent=2) + "\n", encoding="utf-8"
        )

    def _set_job(self, job_id: str, **updates) -> None:
        with self._jobs_lock:
            job = self.jobs[job_id]
            for k, v in updates.items():
                setattr(job, k, v)
            self._save_job(job)

    def job(self, job_id: str) -> JobRecord:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise ServiceError(404, f"unknown job {job_id!r}") from None

    def submit_analyze(self, rec_dir: Path) -> JobRecord:
        rec_dir = Path(rec_dir)
        if not (rec_dir / "recording.toml").exists():
            raise ServiceError(422, f"no recording.toml under {rec_dir}")
        job = JobRecord(job_id=uuid.uuid4().hex[:12], kind="Analyze")
        with self._jobs_lock:
            self.jobs[job.job_id] = job
            self._save_job(job)
        self.pool.submit(self._run_analyze, job.job_id, rec_dir)
        return job

    def _run_analyze(self, job_id: str, rec_dir: Path) -> None:
        self._set_job(job_id, status="Running")
        try:
            rec_id = recording_id(rec_dir)
            out = self.assets_root / "recordings" / rec_id
            analyze_recording(rec_dir, out, self.extractor)
            base = f"recordings/{rec_id}"
            self._set_job(
                job_id,
                status="Done",
                artifacts={
                    "recording_id": rec_id,
                    "events": f"{base}/events.json",
                    "gui_events": f"{base}/gui_events.json",
                },
            )
        except Exception as exc:  # job errors surface via the job record
            self._set_job(job_id, status="Error", error=str(exc))

    def recording_dir(self, rec_id: str) -> Path:
        out = self.assets_root / "recordings" / rec_id
        if not (out / "events.json").exists():
            raise ServiceError(404, f"no analyzed recording {rec_id!r}")
        return out

    # -- label sessions -------------------------------------------------------

    def _suggest_screen(self, screen: np.ndarray, abstraction: np.ndarray):
        classifiers = self.try_classifiers()
        if classifiers is None:
            return []
        fv = screen_features(screen, abstraction, self.extractor)
        ranking = predict_topk(classifiers.screen_model, fv, k=self.config.k)
        return list(ranking.entries)

    def _suggest_widget(self, widget: Widget, screen_category: str):
        classifiers = self.try_classifiers()
        if classifiers is None or not screen_category:
            return []
        fv = widget_features(widget, screen_category, self.taxonomy)
        ranking = predict_topk(classifiers.widget_model, fv, k=self.config.k)
        return list(ranking.entries)

    def open_label_session(self, recording_id: str, usage_id: str) -> LabelSession:
        out = self.recording_dir(recording_id)
        records = json.loads((out / "gui_events.json").read_text(encoding="utf-8"))
        base = f"recordings/{recording_id}"
        items: List[LabelItem] = []
        for rec in records:
            idx = rec["frame_index"]
            name = f"{idx:04d}.png"
            screen = cv2.imread(str(out / "screens" / name), cv2.IMREAD_COLOR)
            abstraction = cv2.imread(str(out / rec["abstract"]), cv2.IMREAD_COLOR)
            screen_sugg = self._suggest_screen(screen, abstraction)
            widget = None
            widget_sugg = []
            crop_ref = None
            if rec.get("widget"):
                w = rec["widget"]
                widget = Widget(
                    box=Box(**w["box"]),
                    crop=cv2.imread(str(out / w["crop"]), cv2.IMREAD_COLOR),
                    class_type=w["class_type"],
                    zone=w["zone"],
                    text=w.get("text", ""),
                )
                top = screen_sugg[0][0] if screen_sugg else ""
                widget_sugg = self._suggest_widget(widget, top)
                crop_ref = f"{base}/{w['crop']}"
            items.append(
                LabelItem(
                    index=idx,
                    kind="event",
                    screen_ref=f"{base}/screens/{name}",
                    action=rec["action"]["kind"],
                    crop_ref=crop_ref,
                    abstract_ref=f"{base}/{rec['abstract']}",
                    widget=widget,
                    screen_suggestions=screen_sugg,
                    widget_suggestions=widget_sugg,
                )
            )
        final = cv2.imread(str(out / "final.png"), cv2.IMREAD_COLOR)
        final_abstract = abstract_screen(
            final, group_elements(segment_screen(final, self.extractor))
        )
        items.append(
            LabelItem(
                index=-1,
                kind="final",
                screen_ref=f"{base}/final.png",
                screen_suggestions=self._suggest_screen(final, final_abstract),
            )
        )
        session = LabelSession(
            session_id=uuid.uuid4().hex[:12],
            recording_id=recording_id,
            usage_id=usage_id,
            items=items,
        )
        self.label_sessions[session.session_id] = session
        return session

    def label_session(self, session_id: str) -> LabelSession:
        try:
            return self.label_sessions[session_id]
        except KeyError:
            raise ServiceError(404, f"unknown label session {session_id!r}") from None

    def apply_label(
        self, session: LabelSession, screen_label: str, widget_label: Optional[str]
    ) -> dict:
        with session.lock:
            if session.done:
                raise ServiceError(409, "label session already complete")
            item = session.items[session.cursor]
            if screen_label not in self.taxonomy.screen_names:
                raise ServiceError(422, f"unknown screen category {screen_label!r}")
            needs_widget = item.kind == "event" and item.widget is not None
            if needs_widget:
                if not widget_label:
                    raise ServiceError(422, "this event needs a widget label")
                if widget_label not in self.taxonomy.widget_names:
                    raise ServiceError(422, f"unknown widget category {widget_label!r}")
            elif widget_label:
                raise ServiceError(422, "no widget to label on this item")
            session.labels.append((screen_label, widget_label or None))
            session.cursor += 1
            response = {
                "session_id": session.session_id,
                "cursor": session.cursor,
                "total": len(session.items),
                "done": session.done,
            }
            if session.done:
                response["model_id"] = self._store_labeled_model(session)
            return response

    def _store_labeled_model(self, session: LabelSession) -> str:
        steps = []
        for item, (screen_label, widget_label) in zip(session.items, session.labels):
            if item.kind != "event":
                continue
            steps.append(
                TraceStep(
                    screen=screen_label,
                    widget=widget_label,
                    action=ActionKind(item.action),
                )
            )
        final_screen = session.labels[-1][0]
        trace = LabeledTrace(
            usage_id=session.usage_id,
            app_id="",
            recording_id=session.recording_id,
            steps=tuple(steps),
            final_screen=final_screen,
        )
        model = build_model(trace, self.taxonomy)
        session.model_id = self.db.store(model)
        return session.model_id

    # -- generation sessions ---------------------------------------------------

    def build_adapter(self, adapter_ref: str):
        if adapter_ref.startswith("script:"):
            path = Path(adapter_ref[len("script:"):])
            if not path.exists():
                raise ServiceError(422, f"no app script at {path}")
            return ScriptedAdapter(load_app(path))
        if adapter_ref.startswith("cmd:"):
            import shlex

            return ExternalProcessAdapter(shlex.split(adapter_ref[len("cmd:"):]))
        raise ServiceError(422, f"unsupported adapter ref {adapter_ref!r}")

    def gen_session(self, session_id: str) -> GenSessionBox:
        try:
            return self.gen_sessions[session_id]
        except KeyError:
            raise ServiceError(404, f"unknown gen session {session_id!r}") from None

    def snapshot_screenshot(self, box: GenSessionBox) -> None:
        session = box.session
        if session.device is None:
            return
        rel = f"gen/{session.session_id}/shot{box.shots:04d}.png"
        path = self.assets_root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        cv2.imwrite(str(path), session.device.screenshot)
        box.shots += 1
        box.screenshot_ref = rel
