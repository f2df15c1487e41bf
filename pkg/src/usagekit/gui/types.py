"""Geometry and element types for screen decomposition."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from usagekit.video.types import UserAction

# The closed set of widget roles the feature encoders understand.
CLASS_TYPES: Tuple[str, ...] = (
    "Button",
    "ImageButton",
    "EditText",
    "Checkbox",
    "ListItem",
    "TextView",
    "Other",
)


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle, inclusive of its top-left, w/h >= 1."""

    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def contains_point(self, x: float, y: float) -> bool:
        return self.x <= x < self.x2 and self.y <= y < self.y2

    def contains_box(self, other: "Box") -> bool:
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.x2 <= self.x2
            and other.y2 <= self.y2
        )

    def properly_contains(self, other: "Box") -> bool:
        return self.contains_box(other) and self != other

    def intersects(self, other: "Box") -> bool:
        return (
            self.x < other.x2
            and other.x < self.x2
            and self.y < other.y2
            and other.y < self.y2
        )

    def intersection(self, other: "Box") -> Optional["Box"]:
        x = max(self.x, other.x)
        y = max(self.y, other.y)
        x2 = min(self.x2, other.x2)
        y2 = min(self.y2, other.y2)
        if x2 <= x or y2 <= y:
            return None
        return Box(x, y, x2 - x, y2 - y)

    def union(self, other: "Box") -> "Box":
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        x2 = max(self.x2, other.x2)
        y2 = max(self.y2, other.y2)
        return Box(x, y, x2 - x, y2 - y)

    def expand(self, margin: int, bounds: Optional[Tuple[int, int]] = None) -> "Box":
        """Grow by `margin` on every side, clipped to (width, height) bounds."""
        x = self.x - margin
        y = self.y - margin
        x2 = self.x2 + margin
        y2 = self.y2 + margin
        if bounds is not None:
            bw, bh = bounds
            x = max(x, 0)
            y = max(y, 0)
            x2 = min(x2, bw)
            y2 = min(y2, bh)
        return Box(x, y, max(x2 - x, 1), max(y2 - y, 1))

    def iou(self, other: "Box") -> float:
        inter = self.intersection(other)
        if inter is None:
            return 0.0
        return inter.area / float(self.area + other.area - inter.area)


def zone_of(box: Box, width: int, height: int) -> int:
    """3x3 screen zone of the box center, numbered 1..9 row-major."""
    cx, cy = box.center
    col = min(2, int(3 * cx / width))
    row = min(2, int(3 * cy / height))
    return 1 + col + 3 * row


class ElementKind(enum.Enum):
    VISUAL = "visual"
    TEXTUAL = "textual"


@dataclass
class GuiElement:
    kind: ElementKind
    box: Box
    text: str = ""  # empty for purely visual elements
    # For grouped elements: the visual component's own box before the text
    # union expanded it. The class heuristic needs the raw control size.
    visual_box: Optional[Box] = None
    # Where the text ink sits (the absorbed line for grouped elements, the own
    # box for Textual ones). Alignment checks need it.
    text_box: Optional[Box] = None


@dataclass
class Widget:
    """An interactive element cut out of a screen."""

    box: Box
    crop: np.ndarray          # pixels of the box, BGR
    class_type: str           # one of CLASS_TYPES
    zone: int                 # 1..9
    text: str = ""
    parent_class: str = ""    # container role when known, e.g. "ListView"

    def __post_init__(self) -> None:
        if self.class_type not in CLASS_TYPES:
            raise ValueError(f"unknown class_type {self.class_type!r}")
        if not 1 <= self.zone <= 9:
            raise ValueError(f"zone out of range: {self.zone}")


@dataclass
class GuiEvent:
    """A (screen, widget, action) triple; widget is None for swipes."""

    index: int
    screen: np.ndarray
    widget: Optional["Widget"]
    action: UserAction
    abstract: Optional[np.ndarray] = None
    element_count: int = 0
