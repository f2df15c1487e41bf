"""Developer-in-the-loop test generation driven by a merged usage model.

A session walks the model and the live app side by side. After every executed
event the session classifies the current screen and offers the top-k
categories; the developer confirms (or corrects) the screen, then picks one of
the recommended widgets; text fields additionally prompt for input. Reaching
an end state of the model completes the session and yields a replayable
script.

Two ordering rules matter and are easy to get wrong:

* when the chosen widget's bound transition lands on an end state, the event
  is recorded WITHOUT being executed and the session completes -- the script's
  last step still drives the app there on replay;
* that end check runs before the text-field check, so a field that would
  finish the usage never asks for input it cannot use.

Choosing a screen that itself is an end state completes the session
immediately (arrival is completion; the remaining script is whatever was
recorded so far).
"""
from __future__ import annotations

import enum
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from usagekit import tomlio
from usagekit.classify.features import FeatureVector, screen_features
from usagekit.classify.models import predict_topk
from usagekit.classify.taxonomy import CanonicalTaxonomy
from usagekit.errors import (
    AdapterError,
    InvalidChoice,
    NoMatchingState,
    NoRecommendation,
)
from usagekit.generate.adapter import DeviceAdapter, DeviceState, ScriptEvent
from usagekit.generate.match import REC_THRESHOLD, Recommendation, match_widgets
from usagekit.gui.abstract import abstract_screen
from usagekit.gui.group import group_elements
from usagekit.gui.segment import segment_screen
from usagekit.gui.textex import TextExtraction
from usagekit.gui.types import Box
from usagekit.irmodel.model import IrModel, successors
from usagekit.irmodel.store import ModelDb
from usagekit.video.types import ActionKind

SCRIPT_HEADER = "usagekit-script v1"


class SessionStatus(enum.Enum):
    AWAITING_SCREEN_CHOICE = "AwaitingScreenChoice"
    AWAITING_WIDGET_CHOICE = "AwaitingWidgetChoice"
    AWAITING_TEXT_INPUT = "AwaitingTextInput"
    COMPLETED = "Completed"
    FAILED = "Failed"


@dataclass(frozen=True)
class ScreenSuggestion:
    name: str
    confidence: float


@dataclass
class SessionClassifiers:
    """Everything the session needs to see the app the way the models do."""

    screen_model: object
    widget_model: object
    taxonomy: CanonicalTaxonomy
    extractor: TextExtraction


@dataclass
class GenerationSession:
    session_id: str
    usage_id: str
    model: IrModel
    adapter: DeviceAdapter
    classifiers: SessionClassifiers
    k: int = 5
    rec_threshold: int = REC_THRESHOLD
    status: SessionStatus = SessionStatus.AWAITING_SCREEN_CHOICE
    current_state: Optional[str] = None
    final_state: str = ""
    device: Optional[DeviceState] = None
    screen_suggestions: List[ScreenSuggestion] = field(default_factory=list)
    recommendations: List[Recommendation] = field(default_factory=list)
    pending: Optional[Recommendation] = None
    events: List[ScriptEvent] = field(default_factory=list)
    failure_reason: str = ""


def classify_device_screen(
    device: DeviceState, classifiers: SessionClassifiers, k: int
) -> List[ScreenSuggestion]:
    """Vision-path screen classification of an adapter screenshot."""
    elements = group_elements(segment_screen(device.screenshot, classifiers.extractor))
    abstraction = abstract_screen(device.screenshot, elements)
    fv = screen_features(device.screenshot, abstraction, classifiers.extractor)
    ranking = predict_topk(classifiers.screen_model, fv, k=k)
    return [ScreenSuggestion(name, conf) for name, conf in ranking.entries]


def _observe(session: GenerationSession, device: DeviceState) -> None:
    session.device = device
    session.screen_suggestions = classify_device_screen(
        device, session.classifiers, session.k
    )
    session.recommendations = []
    session.current_state = None
    session.status = SessionStatus.AWAITING_SCREEN_CHOICE


def fail_session(session: GenerationSession, reason: str) -> None:
    """Mark the session Failed; the reason is kept for reporting."""
    session.status = SessionStatus.FAILED
    session.failure_reason = reason


def start_session(
    usage_id: str,
    adapter: DeviceAdapter,
    db: ModelDb,
    classifiers: SessionClassifiers,
    k: int = 5,
    rec_threshold: int = REC_THRESHOLD,
    session_id: Optional[str] = None,
) -> GenerationSession:
    """Reset the device and open a session on the merged model for the usage."""
    model = db.merged_model(usage_id)
    session = GenerationSession(
        session_id=session_id or uuid.uuid4().hex[:12],
        usage_id=usage_id,
        model=model,
        adapter=adapter,
        classifiers=classifiers,
        k=k,
        rec_threshold=rec_threshold,
    )
    try:
        device = adapter.reset()
    except AdapterError as exc:
        fail_session(session, f"adapter reset failed: {exc}")
        raise
    _observe(session, device)
    return session


def _require_status(session: GenerationSession, status: SessionStatus) -> None:
    if session.status is not status:
        raise InvalidChoice(
            f"session is {session.status.value}, not {status.value}"
        )


def choose_screen(session: GenerationSession, category: str) -> GenerationSession:
    """Confirm which model state the current screen is.

    The category must name a state of the usage model; otherwise
    NoMatchingState is raised and the session stays open for another choice.
    Choosing an end state completes the session as it stands.
    """
    _require_status(session, SessionStatus.AWAITING_SCREEN_CHOICE)
    session.classifiers.taxonomy.require_screen(category)
    if not session.model.has_state(category):
        raise NoMatchingState(
            f"model for {session.usage_id!r} has no state {category!r}"
        )
    session.current_state = category
    if session.model.states[category].is_end:
        session.final_state = category
        session.status = SessionStatus.COMPLETED
        return session
    expected = successors(session.model, category)
    try:
        session.recommendations = match_widgets(
            session.device,
            expected,
            screen_category=category,
            widget_model=session.classifiers.widget_model,
            taxonomy=session.classifiers.taxonomy,
            end_states=set(session.model.end_states),
            rec_threshold=session.rec_threshold,
            k=session.k,
        )
    except NoRecommendation as exc:
        fail_session(session, str(exc))
        raise
    session.status = SessionStatus.AWAITING_WIDGET_CHOICE
    return session


def _recommendation_for(session: GenerationSession, widget_id: str) -> Recommendation:
    for rec in session.recommendations:
        if rec.wid == widget_id:
            return rec
    raise InvalidChoice(f"widget {widget_id!r} is not among the recommendations")


def _event_for(rec: Recommendation, screen: str, text: str = "") -> ScriptEvent:
    return ScriptEvent(
        screen=screen,
        widget_id=rec.wid,
        widget_box=rec.widget.box,
        widget_text=rec.widget.text,
        widget_canonical=rec.category,
        action=rec.transition.action,
        text=text,
    )


def _execute(session: GenerationSession, rec: Recommendation, text: str) -> None:
    event = _event_for(rec, session.current_state or "", text)
    try:
        device = session.adapter.execute(event)
    except AdapterError as exc:
        fail_session(session, f"adapter failed to execute: {exc}")
        raise
    session.events.append(event)
    _observe(session, device)


def choose_widget(session: GenerationSession, widget_id: str) -> GenerationSession:
    """Act on one recommended widget.

    Transitions into an end state record the event and complete without
    executing it; text fields park the event and ask for input; everything
    else executes immediately and re-enters screen confirmation.
    """
    _require_status(session, SessionStatus.AWAITING_WIDGET_CHOICE)
    rec = _recommendation_for(session, widget_id)
    if rec.transition.to_state in session.model.end_states:
        session.events.append(_event_for(rec, session.current_state or ""))
        session.final_state = rec.transition.to_state
        session.status = SessionStatus.COMPLETED
        return session
    if rec.widget.class_type == "EditText":
        session.pending = rec
        session.status = SessionStatus.AWAITING_TEXT_INPUT
        return session
    _execute(session, rec, "")
    return session


def provide_text(session: GenerationSession, text: str) -> GenerationSession:
    """Supply input for the pending text field and execute the parked event."""
    _require_status(session, SessionStatus.AWAITING_TEXT_INPUT)
    rec = session.pending
    if rec is None:
        raise InvalidChoice("no pending text field")
    session.pending = None
    _execute(session, rec, text)
    return session


# ---------------------------------------------------------------------------
# scripts

@dataclass(frozen=True)
class TestScript:
    usage_id: str
    events: tuple
    final_screen: str = ""   # end state the session completed on


def session_script(session: GenerationSession) -> TestScript:
    if session.status is not SessionStatus.COMPLETED:
        raise InvalidChoice(
            f"scripts come from completed sessions, this one is {session.status.value}"
        )
    return TestScript(
        usage_id=session.usage_id,
        events=tuple(session.events),
        final_screen=session.final_state,
    )


def save_script(script: TestScript, path: Path | str) -> None:
    tomlio.write_toml(
        path,
        {
            "script": {
                "schema": SCRIPT_HEADER,
                "usage": script.usage_id,
                "final_screen": script.final_screen,
            },
            "events": [
                {
                    "screen": e.screen,
                    "widget_id": e.widget_id,
                    "box": [e.widget_box.x, e.widget_box.y, e.widget_box.w, e.widget_box.h],
                    "widget_text": e.widget_text,
                    "canonical": e.widget_canonical,
                    "action": e.action.value,
                    "text": e.text,
                }
                for e in script.events
            ],
        },
    )


def load_script(path: Path | str) -> TestScript:
    data = tomlio.read_toml(path)
    head = data.get("script", {})
    if head.get("schema") != SCRIPT_HEADER:
        raise InvalidChoice(f"not a test script file: {path}")
    events = tuple(
        ScriptEvent(
            screen=e["screen"],
            widget_id=e["widget_id"],
            widget_box=Box(*[int(v) for v in e["box"]]),
            widget_text=e.get("widget_text", ""),
            widget_canonical=e.get("canonical", ""),
            action=ActionKind(e["action"]),
            text=e.get("text", ""),
        )
        for e in data.get("events", [])
    )
    return TestScript(
        usage_id=str(head.get("usage", "")),
        events=events,
        final_screen=str(head.get("final_screen", "")),
    )


def replay(script: TestScript, adapter: DeviceAdapter) -> List[str]:
    """Run a script against a fresh device; return the observed screen ids.

    The observation before each event should equal the event's recorded
    screen whenever the adapter's screen ids live in the same vocabulary
    (true for scripted apps); callers compare against
    ``[e.screen for e in script.events]``.
    """
    state = adapter.reset()
    observed: List[str] = []
    for event in script.events:
        observed.append(state.screen_id)
        state = adapter.execute(event)
    return observed
