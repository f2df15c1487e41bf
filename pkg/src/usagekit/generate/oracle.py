"""Automated session driving: a simulated developer that answers every prompt
with the ground-truth choice when it is on offer, and the top suggestion when
it is not.

Screen prompts are answered with the screen the device actually shows
(falling back through the ranked suggestions when that is not a model state).
Widget prompts are answered with the recommendation matching the ground-truth
widget id when one is present, else the first recommendation of the expected
category, else the top recommendation. Every widget prompt is logged so
recommendation accuracy can be computed afterwards.

The ground-truth cursor advances only when the executed choice had the
expected category, and skips ahead past steps whose screen no longer matches
(the walk may legitimately shortcut, e.g. submitting a search jumps straight
to the results). A step cap turns a session that chases a widget it can never
find into a Failed result instead of an endless loop.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from usagekit.errors import (
    AdapterError,
    InvalidChoice,
    NoMatchingState,
    NoRecommendation,
)
from usagekit.generate.adapter import DeviceAdapter
from usagekit.generate.match import REC_THRESHOLD, Recommendation
from usagekit.generate.session import (
    GenerationSession,
    SessionClassifiers,
    SessionStatus,
    TestScript,
    choose_screen,
    choose_widget,
    fail_session,
    provide_text,
    session_script,
    start_session,
)
from usagekit.irmodel.model import LabeledTrace, TraceStep
from usagekit.irmodel.store import ModelDb

STEP_CAP = 30

LOG_COLUMNS = (
    "step",
    "expected",
    "suggested_top1",
    "suggested_top2",
    "suggested_top3",
    "suggested_top4",
    "suggested_top5",
    "hit",
)


@dataclass(frozen=True)
class OracleStep:
    step: int
    expected: str                 # ground-truth category, "" when exhausted
    suggested: Tuple[str, ...]    # categories of the ranked recommendations
    hit: bool


@dataclass
class OracleResult:
    usage_id: str
    status: SessionStatus
    script: Optional[TestScript]
    steps: List[OracleStep]
    failure_reason: str = ""

    @property
    def completed(self) -> bool:
        return self.status is SessionStatus.COMPLETED


def _answer_screen(session: GenerationSession) -> bool:
    """Pick the actual screen if suggested, else walk the ranked suggestions."""
    names = [s.name for s in session.screen_suggestions]
    actual = session.device.screen_id if session.device else ""
    order = [actual] if actual in names else []
    order += [n for n in names if n not in order]
    for name in order:
        try:
            choose_screen(session, name)
            return True
        except NoMatchingState:
            continue
        except NoRecommendation:
            return True  # session already Failed with the reason recorded
    fail_session(session, "no suggested screen matches a model state")
    return True


def _pick(
    recs: Sequence[Recommendation], expected: str, expected_wid: str
) -> Recommendation:
    if expected_wid:
        for rec in recs:
            if rec.wid == expected_wid:
                return rec
    if expected:
        for rec in recs:
            if rec.category == expected:
                return rec
    return recs[0]


def run_oracle_session(
    usage_id: str,
    adapter: DeviceAdapter,
    db: ModelDb,
    ground_truth: LabeledTrace,
    classifiers: SessionClassifiers,
    *,
    wids: Optional[Sequence[str]] = None,
    texts: Optional[Sequence[str]] = None,
    k: int = 5,
    rec_threshold: int = REC_THRESHOLD,
    step_cap: int = STEP_CAP,
) -> OracleResult:
    """Drive a full session for `usage_id`, answering prompts from the trace.

    `wids`/`texts` optionally carry the adapter widget id and typed input for
    each widget-bearing trace step (swipes excluded), in order. Raises
    InvalidChoice on an empty ground truth; adapter and model-store errors
    propagate from session start.
    """
    if not ground_truth.steps:
        raise InvalidChoice("ground truth trace has no steps")
    widget_steps: List[TraceStep] = [
        s for s in ground_truth.steps if s.widget is not None
    ]
    wid_of = list(wids) if wids is not None else [""] * len(widget_steps)
    text_of = list(texts) if texts is not None else [""] * len(widget_steps)
    if len(wid_of) != len(widget_steps) or len(text_of) != len(widget_steps):
        raise InvalidChoice("wids/texts not aligned with widget-bearing steps")

    session = start_session(
        usage_id, adapter, db, classifiers, k=k, rec_threshold=rec_threshold
    )
    log: List[OracleStep] = []
    cursor = 0
    while session.status in (
        SessionStatus.AWAITING_SCREEN_CHOICE,
        SessionStatus.AWAITING_WIDGET_CHOICE,
    ):
        if session.status is SessionStatus.AWAITING_SCREEN_CHOICE:
            _answer_screen(session)
            continue

        if len(log) >= step_cap:
            fail_session(session, f"step cap of {step_cap} reached")
            break
        while (
            cursor < len(widget_steps)
            and widget_steps[cursor].screen != session.current_state
        ):
            cursor += 1
        expected = widget_steps[cursor].widget if cursor < len(widget_steps) else ""
        expected_wid = wid_of[cursor] if cursor < len(widget_steps) else ""
        categories = tuple(r.category for r in session.recommendations)
        hit = bool(expected) and expected in categories
        log.append(OracleStep(len(log) + 1, expected or "", categories, hit))

        chosen = _pick(session.recommendations, expected or "", expected_wid)
        try:
            choose_widget(session, chosen.wid)
            if session.status is SessionStatus.AWAITING_TEXT_INPUT:
                provide_text(
                    session, text_of[cursor] if cursor < len(widget_steps) else ""
                )
        except AdapterError:
            break  # session already Failed
        if chosen.category == expected:
            cursor += 1

    script = (
        session_script(session)
        if session.status is SessionStatus.COMPLETED
        else None
    )
    return OracleResult(
        usage_id=usage_id,
        status=session.status,
        script=script,
        steps=log,
        failure_reason=session.failure_reason,
    )


def oracle_inputs_from_truth(truth) -> Tuple[LabeledTrace, List[str], List[str]]:
    """(trace, wids, texts) for run_oracle_session from a fixture recording's
    ground truth; wids/texts align with the widget-bearing steps."""
    from usagekit.fixtures.generate import truth_to_trace

    trace = truth_to_trace(truth)
    tapped = [e for e in truth.retained if e.wid]
    return trace, [e.wid for e in tapped], [e.text for e in tapped]


def oracle_inputs_from_usage(
    app, usage_id: str
) -> Tuple[LabeledTrace, List[str], List[str]]:
    """(trace, wids, texts) straight from a scripted app's usage definition,
    so oracle runs need no recording."""
    usage = app.usage(usage_id)
    steps = []
    wids: List[str] = []
    texts: List[str] = []
    for step in usage.steps:
        screen = app.screen(step.screen)
        if step.widget is None:
            steps.append(TraceStep(screen.canonical, None, step.kind))
        else:
            spec = screen.widget(step.widget)
            if not spec.canonical:
                raise InvalidChoice(
                    f"usage {usage_id!r} taps unlabeled widget "
                    f"{step.screen}.{step.widget}"
                )
            steps.append(TraceStep(screen.canonical, spec.canonical, step.kind))
            wids.append(step.widget)
            texts.append(step.text)
    return (
        LabeledTrace(
            usage_id=usage_id,
            app_id=app.app_id,
            recording_id=f"{app.app_id}-{usage_id}-oracle",
            steps=tuple(steps),
            final_screen=app.screen(usage.final_screen).canonical,
        ),
        wids,
        texts,
    )


def write_step_log(steps: Sequence[OracleStep], path: Path | str) -> None:
    """Step log as CSV: step, expected, suggested_top1..5, hit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOG_COLUMNS)
        for s in steps:
            top5 = list(s.suggested[:5]) + [""] * (5 - min(len(s.suggested), 5))
            writer.writerow([s.step, s.expected, *top5, int(s.hit)])
