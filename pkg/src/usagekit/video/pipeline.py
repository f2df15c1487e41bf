"""Recording → ordered event frames, with the typing filter and events.json IO."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from usagekit.video.actions import ActionConfig, classify_action
from usagekit.video.keyboard import (
    KeyboardClassifier,
    KeyboardConfig,
    detect_keyboard,
    keyboard_region_top,
)
from usagekit.video.touch import TouchDetectConfig, detect_touches, group_touch_frames
from usagekit.video.types import ActionKind, EventFrame, Recording, TouchPoint, UserAction

TYPING = "typing"


@dataclass
class AnalysisConfig:
    touch: TouchDetectConfig = field(default_factory=TouchDetectConfig)
    action: ActionConfig = field(default_factory=ActionConfig)
    keyboard: KeyboardConfig = field(default_factory=KeyboardConfig)
    keyboard_classifier: Optional[KeyboardClassifier] = None


def extract_events(rec: Recording, config: Optional[AnalysisConfig] = None) -> List[EventFrame]:
    """Detect touch groups and produce one flagged EventFrame per group."""
    config = config or AnalysisConfig()
    touches = detect_touches(rec.frames, config.touch)
    groups = group_touch_frames(touches)
    by_index = {f.index: f for f in rec.frames}
    events: List[EventFrame] = []
    for g in groups:
        frame = by_index[g.event_frame_index]
        clean = None
        for j in range(g.event_frame_index - 1, -1, -1):
            if touches[j] is None:
                clean = rec.frames[j].image
                break
        events.append(
            EventFrame(
                frame=frame,
                touch=g.touches[0],
                action=classify_action(g, config.action, rec.fps),
                clean_image=clean if clean is not None else frame.image,
            )
        )
    _mark_typing(events, rec.height, config)
    return events


def _mark_typing(events: List[EventFrame], height: int, config: AnalysisConfig) -> None:
    region_top = keyboard_region_top(height, config.keyboard)
    for ev in events:
        keyboard, _ = detect_keyboard(ev.frame, config.keyboard, config.keyboard_classifier)
        if keyboard and ev.touch.y >= region_top:
            ev.filtered = True
            ev.reason = TYPING
        else:
            ev.filtered = False
            ev.reason = None


def filter_event_frames(
    events: List[EventFrame],
    config: Optional[KeyboardConfig] = None,
    classifier: Optional[KeyboardClassifier] = None,
) -> List[EventFrame]:
    """Drop events whose touch lands in the keyboard region while a keyboard shows."""
    config = config or KeyboardConfig()
    kept: List[EventFrame] = []
    for ev in events:
        height = ev.frame.image.shape[0]
        keyboard, _ = detect_keyboard(ev.frame, config, classifier)
        in_region = ev.touch.y >= keyboard_region_top(height, config)
        if keyboard and in_region:
            ev.filtered = True
            ev.reason = TYPING
        else:
            ev.filtered = False
            ev.reason = None
            kept.append(ev)
    return kept


# ---------------------------------------------------------------------------
# events.json

def action_to_dict(action: UserAction) -> dict:
    return {
        "kind": action.kind.value,
        "start": list(action.start),
        "end": list(action.end),
        "duration_frames": action.duration_frames,
    }


def action_from_dict(d: dict) -> UserAction:
    return UserAction(
        kind=ActionKind(d["kind"]),
        start=tuple(d["start"]),
        end=tuple(d["end"]),
        duration_frames=int(d["duration_frames"]),
    )


def events_to_records(events: List[EventFrame]) -> List[dict]:
    return [
        {
            "frame_index": ev.frame.index,
            "action": action_to_dict(ev.action),
            "touch": {"x": ev.touch.x, "y": ev.touch.y},
            "filtered": ev.filtered,
            "reason": ev.reason,
        }
        for ev in events
    ]


def write_events_json(events: List[EventFrame], path: Path | str) -> Path:
    path = Path(path)
    path.write_text(json.dumps(events_to_records(events), indent=2) + "\n", encoding="utf-8")
    return path


def read_events_json(path: Path | str) -> List[dict]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
