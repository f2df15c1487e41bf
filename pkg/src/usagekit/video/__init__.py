"""Frame-sequence analysis: touch indicator detection, action classification, typing filter."""

from usagekit.video.types import (
    ActionKind,
    EventFrame,
    Frame,
    Recording,
    TouchFrameGroup,
    TouchPoint,
    UserAction,
)

__all__ = [
    "ActionKind",
    "EventFrame",
    "Frame",
    "Recording",
    "TouchFrameGroup",
    "TouchPoint",
    "UserAction",
]
