"""Data types for recordings and detected touch events."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np


class ActionKind(enum.Enum):
    CLICK = "click"
    LONG_TAP = "long_tap"
    SWIPE_UP = "swipe_up"
    SWIPE_DOWN = "swipe_down"
    SWIPE_LEFT = "swipe_left"
    SWIPE_RIGHT = "swipe_right"

    @property
    def is_swipe(self) -> bool:
        return self in (
            ActionKind.SWIPE_UP,
            ActionKind.SWIPE_DOWN,
            ActionKind.SWIPE_LEFT,
            ActionKind.SWIPE_RIGHT,
        )


@dataclass
class Frame:
    index: int
    image: np.ndarray       # HxWx3 uint8, BGR
    timestamp_ms: float = 0.0


@dataclass
class Recording:
    rec_id: str
    fps: float
    width: int
    height: int
    app_id: str = ""
    usage_id: str = ""
    frames: List[Frame] = field(default_factory=list)


@dataclass(frozen=True)
class TouchPoint:
    """A touch indicator found on one frame."""

    frame_index: int
    x: int
    y: int
    score: float     # template match score in [0, 1]
    opacity: float   # estimated indicator opacity in [0, 1]


@dataclass
class TouchFrameGroup:
    """A maximal run of consecutive frames that carry a touch indicator."""

    touches: List[TouchPoint]

    @property
    def frame_indices(self) -> List[int]:
        return [t.frame_index for t in self.touches]

    @property
    def event_frame_index(self) -> int:
        return self.touches[0].frame_index

    @property
    def duration_frames(self) -> int:
        return len(self.touches)


@dataclass(frozen=True)
class UserAction:
    kind: ActionKind
    start: Tuple[int, int]
    end: Tuple[int, int]
    duration_frames: int


@dataclass
class EventFrame:
    """One user interaction: the first frame of a touch group plus its action."""

    frame: Frame
    touch: TouchPoint
    action: UserAction
    filtered: bool = False
    reason: Optional[str] = None     # "typing" when removed by the keyboard filter
    # Nearest earlier indicator-free raster; GUI extraction runs on this so the
    # blended indicator never shows up as a phantom element. Falls back to the
    # event frame itself when the touch starts on frame 0.
    clean_image: Optional[np.ndarray] = None
