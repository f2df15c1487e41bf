"""Classify a touch-frame group as a click, long tap, or directional swipe."""
from __future__ import annotations

import math
from dataclasses import dataclass

from usagekit.video.types import ActionKind, TouchFrameGroup, UserAction


@dataclass(frozen=True)
class ActionConfig:
    click_displacement_max: float = 20.0
    swipe_displacement_min: float = 60.0
    long_tap_seconds: float = 0.5


def long_tap_min_frames(fps: float, config: ActionConfig = ActionConfig()) -> int:
    return math.ceil(config.long_tap_seconds * fps)


def classify_action(
    group: TouchFrameGroup, config: ActionConfig = ActionConfig(), fps: float = 30.0
) -> UserAction:
    first = group.touches[0]
    last = group.touches[-1]
    dx = last.x - first.x
    dy = last.y - first.y
    n = group.duration_frames

    if max(abs(dx), abs(dy)) > config.swipe_displacement_min:
        if abs(dx) >= abs(dy):  # ties resolve toward horizontal
            kind = ActionKind.SWIPE_RIGHT if dx > 0 else ActionKind.SWIPE_LEFT
        else:
            kind = ActionKind.SWIPE_DOWN if dy > 0 else ActionKind.SWIPE_UP
        return UserAction(kind, (first.x, first.y), (last.x, last.y), n)

    # Stationary press. Drift between the click radius and the swipe threshold
    # is treated as jitter: the action is anchored at the contact point.
    start = (first.x, first.y)
    end = (last.x, last.y)
    if math.hypot(dx, dy) > config.click_displacement_max:
        end = start
    kind = ActionKind.LONG_TAP if n >= long_tap_min_frames(fps, config) else ActionKind.CLICK
    return UserAction(kind, start, end, n)
