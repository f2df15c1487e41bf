"""Group visual elements with their adjacent text."""
from __future__ import annotations

import math
from typing import List, Optional

from usagekit.gui.types import Box, ElementKind, GuiElement

DEFAULT_LINE_THRESHOLD = 0.5


def _center_distance(a: Box, b: Box) -> float:
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def _horizontal_gap(a: Box, b: Box) -> int:
    if b.x >= a.x2:
        return b.x - a.x2
    if a.x >= b.x2:
        return a.x - b.x2
    return 0


def vertically_collocated(visual: Box, text: Box, line_threshold: float) -> bool:
    """Same-line test: enough vertical overlap and at most one line-height of gap.

    The horizontal bound keeps a control from absorbing text that merely shares
    its row across the screen; anything further than the text's own height away
    is not "together in a line".
    """
    overlap = min(visual.y2, text.y2) - max(visual.y, text.y)
    if overlap < line_threshold * min(visual.h, text.h):
        return False
    return _horizontal_gap(visual, text) <= text.h


def group_elements(
    elements: List[GuiElement], line_threshold: float = DEFAULT_LINE_THRESHOLD
) -> List[GuiElement]:
    """Expand each Visual element over its closest Textual neighbour when collocated.

    The closest element overall (by center distance) must itself be Textual and
    share the line; otherwise the Visual element is left unchanged. Textual
    elements are never merged with each other and are carried through as-is.
    All decisions are made against the input list, so element order cannot
    change the result. Boxes only ever grow.
    """
    out: List[GuiElement] = []
    for idx, el in enumerate(elements):
        if el.kind is not ElementKind.VISUAL:
            out.append(GuiElement(el.kind, el.box, el.text, text_box=el.box))
            continue
        closest: Optional[GuiElement] = None
        best = float("inf")
        for jdx, other in enumerate(elements):
            if jdx == idx:
                continue
            d = _center_distance(el.box, other.box)
            if d < best:
                best = d
                closest = other
        if (
            closest is not None
            and closest.kind is ElementKind.TEXTUAL
            and vertically_collocated(el.box, closest.box, line_threshold)
        ):
            out.append(
                GuiElement(
                    ElementKind.VISUAL,
                    el.box.union(closest.box),
                    closest.text,
                    visual_box=el.box,
                    text_box=closest.box,
                )
            )
        else:
            out.append(GuiElement(el.kind, el.box, el.text, visual_box=el.box))
    return out
