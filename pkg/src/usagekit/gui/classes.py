"""Rule-based widget class inference.

A deliberately auditable replacement for a learned widget classifier: the
class drives only feature one-hots and the input-required check, so a coarse
but deterministic rule set is preferable to an opaque model here.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from usagekit.gui.types import Box, ElementKind, GuiElement

CHECKBOX_MAX_SIDE = 32
ICON_MAX_SIDE = 96
EDIT_MIN_HEIGHT = 24
EDIT_ASPECT = 3.0
FLAT_INTERIOR_MIN = 0.6
LEFT_ALIGN_FRAC = 0.15


def _mostly_flat_interior(screen: np.ndarray, box: Box) -> bool:
    crop = screen[max(box.y, 0) : box.y2, max(box.x, 0) : box.x2]
    if crop.size == 0:
        return False
    flat = crop.reshape(-1, crop.shape[-1])
    _, counts = np.unique(flat, axis=0, return_counts=True)
    return counts.max() / flat.shape[0] >= FLAT_INTERIOR_MIN


def _text_left_aligned(el: GuiElement) -> bool:
    if not el.text:
        return True
    if el.text_box is None:
        return False
    return (el.text_box.x - el.box.x) <= LEFT_ALIGN_FRAC * el.box.w


def infer_class_type(
    el: GuiElement, screen: Optional[np.ndarray] = None, parent_class: str = ""
) -> str:
    if parent_class == "ListView":
        return "ListItem"
    if el.kind is ElementKind.TEXTUAL:
        return "TextView"

    box = el.box
    control = el.visual_box or box
    grouped_outside = (
        el.text != ""
        and el.visual_box is not None
        and el.text_box is not None
        and not el.visual_box.intersects(el.text_box)
    )
    if (
        grouped_outside
        and control.w <= CHECKBOX_MAX_SIDE
        and control.h <= CHECKBOX_MAX_SIDE
        and 0.75 <= control.w / control.h <= 1.33
    ):
        return "Checkbox"
    if (
        box.h >= EDIT_MIN_HEIGHT
        and box.w / box.h > EDIT_ASPECT
        and _text_left_aligned(el)
        and (screen is None or _mostly_flat_interior(screen, control))
    ):
        return "EditText"
    if el.text:
        return "Button"
    if max(box.w, box.h) <= ICON_MAX_SIDE:
        return "ImageButton"
    return "Other"
