"""Associate a touch point with exactly one GUI element."""
from __future__ import annotations

import math
from typing import List, Sequence, Tuple

from usagekit.errors import NoTargetWidget
from usagekit.gui.types import Box, GuiElement

DEFAULT_EXPAND_STEP = 10
DEFAULT_MAX_ROUNDS = 10


def _covering(boxes: Sequence[Box], x: float, y: float) -> List[int]:
    return [i for i, b in enumerate(boxes) if b.contains_point(x, y)]


def _pick(boxes: Sequence[Box], covering: List[int], x: float, y: float) -> int:
    """The three-case disambiguation over candidate indices (len >= 1)."""
    if len(covering) == 1:
        return covering[0]
    # drop coarse candidates: any candidate whose box properly contains
    # another candidate's box loses to the finer one
    survivors = [
        i
        for i in covering
        if not any(j != i and boxes[i].properly_contains(boxes[j]) for j in covering)
    ]
    if not survivors:  # pragma: no cover - proper containment is a strict order
        survivors = covering
    best = None
    best_key: Tuple[float, int] = (float("inf"), -1)
    for i in survivors:
        cx, cy = boxes[i].center
        key = (math.hypot(cx - x, cy - y), i)
        if key < best_key:
            best_key = key
            best = i
    assert best is not None
    return best


def select_touched_widget(
    elements: List[GuiElement],
    touch_x: float,
    touch_y: float,
    expand_step: int = DEFAULT_EXPAND_STEP,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> GuiElement:
    """Select the element under (or nearest to) the touch point.

    Case 1: exactly one box covers the touch — take it. Case 2: none cover —
    grow every box by `expand_step` per round until at least one does. Case 3:
    several cover — eliminate boxes that properly contain another candidate,
    then take the one whose center is closest (ties to the earliest element).
    Expansion is geometric only; returned elements keep their real boxes.
    """
    if not elements:
        raise NoTargetWidget("no elements on screen")
    boxes = [el.box for el in elements]
    for _ in range(max_rounds + 1):
        covering = _covering(boxes, touch_x, touch_y)
        if covering:
            return elements[_pick(boxes, covering, touch_x, touch_y)]
        boxes = [b.expand(expand_step) for b in boxes]
    raise NoTargetWidget(
        f"no element within {expand_step * max_rounds} px of ({touch_x}, {touch_y})"
    )
