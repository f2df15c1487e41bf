"""Deterministic screen renderer for synthetic fixture apps.

Everything is drawn without anti-aliasing so text can be recovered exactly by
glyph matching and touch indicators behave predictably under template scoring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import cv2
import numpy as np

from usagekit import font
from usagekit.gui.types import Box
from usagekit.video import touch as touchdet

Color = Tuple[int, int, int]


@dataclass(frozen=True)
class Theme:
    bg: Color
    panel: Color
    fill: Color          # default control fill
    accent: Color        # primary-action fill
    field_bg: Color
    border: Color
    text: Color          # text on bg/panel/field
    text_on_fill: Color  # text on fill/accent
    hint: Color          # placeholder text in fields
    scale: int = 2       # font scale


@dataclass
class WidgetSpec:
    """Declarative description of one on-screen element of a fixture app."""

    wid: str
    kind: str                      # button|field|label|icon|list_item|checkbox|image
    box: Box
    text: str = ""
    icon: str = ""                 # bars|plus|cross|diamond|funnel|chevron|squares
    style: str = ""                # "accent" marks primary buttons
    canonical: str = ""            # widget taxonomy label; "" = decoration
    parent: str = ""               # container wid
    parent_class: str = ""         # container role, e.g. "ListView"
    tap: Tuple[float, float] = (0.5, 0.5)  # relative tap point inside box
    text_scale: int = 0            # 0 = theme default


@dataclass
class ScreenSpec:
    sid: str
    canonical: str
    widgets: List[WidgetSpec] = field(default_factory=list)

    def widget(self, wid: str) -> WidgetSpec:
        for w in self.widgets:
            if w.wid == wid:
                return w
        raise KeyError(wid)


# ---------------------------------------------------------------------------
# primitives

def fill_rect(img: np.ndarray, box: Box, color: Color) -> None:
    h, w = img.shape[:2]
    x0, y0 = max(box.x, 0), max(box.y, 0)
    x1, y1 = min(box.x2, w), min(box.y2, h)
    if x0 < x1 and y0 < y1:
        img[y0:y1, x0:x1] = color


def stroke_rect(img: np.ndarray, box: Box, color: Color, t: int = 2) -> None:
    fill_rect(img, Box(box.x, box.y, box.w, t), color)
    fill_rect(img, Box(box.x, box.y2 - t, box.w, t), color)
    fill_rect(img, Box(box.x, box.y, t, box.h), color)
    fill_rect(img, Box(box.x2 - t, box.y, t, box.h), color)


def _inset(box: Box, frac: float) -> Box:
    dx = int(box.w * frac)
    dy = int(box.h * frac)
    return Box(box.x + dx, box.y + dy, max(box.w - 2 * dx, 1), max(box.h - 2 * dy, 1))


def draw_shape(img: np.ndarray, box: Box, shape: str, color: Color) -> None:
    """Small pictograms for icon widgets. Deliberately nothing circular."""
    b = _inset(box, 0.22)
    t = max(2, b.h // 7)
    if shape == "bars":
        for k in range(3):
            y = b.y + k * (b.h - t) // 2
            fill_rect(img, Box(b.x, y, b.w, t), color)
    elif shape == "plus":
        fill_rect(img, Box(b.x, b.y + (b.h - t) // 2, b.w, t), color)
        fill_rect(img, Box(b.x + (b.w - t) // 2, b.y, t, b.h), color)
    elif shape == "cross":
        cv2.line(img, (b.x, b.y), (b.x2 - 1, b.y2 - 1), color, t, lineType=cv2.LINE_8)
        cv2.line(img, (b.x, b.y2 - 1), (b.x2 - 1, b.y), color, t, lineType=cv2.LINE_8)
    elif shape == "diamond":
        cx, cy = int(b.x + b.w / 2), int(b.y + b.h / 2)
        pts = np.array([[cx, b.y], [b.x2 - 1, cy], [cx, b.y2 - 1], [b.x, cy]], np.int32)
        cv2.fillConvexPoly(img, pts, color, lineType=cv2.LINE_8)
    elif shape == "funnel":
        pts = np.array(
            [[b.x, b.y], [b.x2 - 1, b.y], [b.x + b.w // 2, b.y + 2 * b.h // 3]], np.int32
        )
        cv2.fillConvexPoly(img, pts, color, lineType=cv2.LINE_8)
        fill_rect(img, Box(b.x + b.w // 2 - t // 2, b.y + b.h // 2, t, b.h // 2), color)
    elif shape == "chevron":
        cx = b.x + b.w // 3
        cv2.line(img, (cx, b.y), (b.x2 - 1, b.y + b.h // 2), color, t, lineType=cv2.LINE_8)
        cv2.line(img, (b.x2 - 1, b.y + b.h // 2), (cx, b.y2 - 1), color, t, lineType=cv2.LINE_8)
    elif shape == "squares":
        gw = max(b.w // 3, 2)
        gh = max(b.h // 3, 2)
        for (fx, fy) in ((0.0, 0.0), (0.55, 0.0), (0.0, 0.55), (0.55, 0.55)):
            fill_rect(img, Box(b.x + int(fx * b.w), b.y + int(fy * b.h), gw, gh), color)
    else:
        stroke_rect(img, b, color, t)


# ---------------------------------------------------------------------------
# touch indicator (appearance model shared with the detector)

def stamp_indicator(
    img: np.ndarray, cx: int, cy: int, opacity: float, radius: int = touchdet.IND_RADIUS
) -> None:
    """Alpha-blend a touch indicator centered on (cx, cy) into the frame."""
    disk, ring = touchdet.indicator_masks(radius)
    d = 2 * radius + 1
    h, w = img.shape[:2]
    x0, y0 = cx - radius, cy - radius
    sx0, sy0 = max(x0, 0), max(y0, 0)
    sx1, sy1 = min(x0 + d, w), min(y0 + d, h)
    if sx0 >= sx1 or sy0 >= sy1:
        return
    sub = img[sy0:sy1, sx0:sx1].astype(np.float32)
    m_disk = disk[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0]
    m_ring = ring[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0]
    overlay = np.full(m_disk.shape, float(touchdet.IND_INNER), np.float32)
    overlay[m_ring] = float(touchdet.IND_RING)
    for c in range(3):
        ch = sub[:, :, c]
        ch[m_disk] = (1.0 - opacity) * ch[m_disk] + opacity * overlay[m_disk]
    img[sy0:sy1, sx0:sx1] = np.rint(sub).astype(np.uint8)


# ---------------------------------------------------------------------------
# keyboard

KEY_ROWS = ("1234567890", "QWERTYUIOP", "ASDFGHJKL@", "ZXCVBNM.-_")
KEYBOARD_FRACTION = 0.35


def keyboard_top(height: int) -> int:
    return height - int(round(KEYBOARD_FRACTION * height))


def draw_keyboard(img: np.ndarray, theme: Theme) -> Dict[str, Tuple[int, int]]:
    """Paint the keyboard over the bottom of the frame; returns key centers."""
    h, w = img.shape[:2]
    top = keyboard_top(h)
    fill_rect(img, Box(0, top, w, h - top), (208, 208, 208))
    rows = len(KEY_ROWS)
    row_h = (h - top) // rows
    key_w = w // 10
    centers: Dict[str, Tuple[int, int]] = {}
    for r, row in enumerate(KEY_ROWS):
        y = top + r * row_h
        for c, ch in enumerate(row):
            kx = c * key_w
            key = Box(kx + 2, y + 2, key_w - 4, row_h - 4)
            fill_rect(img, key, (250, 250, 250))
            stroke_rect(img, key, (120, 120, 120), 2)
            tw, th = font.text_size(ch, theme.scale)
            font.draw_text(
                img,
                key.x + (key.w - tw) // 2,
                key.y + (key.h - th) // 2,
                ch,
                (40, 40, 40),
                theme.scale,
            )
            centers[ch] = (key.x + key.w // 2, key.y + key.h // 2)
    return centers


# ---------------------------------------------------------------------------
# widgets and screens

def _draw_widget(img: np.ndarray, w: WidgetSpec, theme: Theme, typed: Optional[str]) -> None:
    scale = w.text_scale or theme.scale
    b = w.box
    if w.kind == "button":
        fill = theme.accent if w.style == "accent" else theme.fill
        fill_rect(img, b, fill)
        stroke_rect(img, b, theme.border, 2)
        if w.text:
            tw, th = font.text_size(w.text, scale)
            font.draw_text(
                img, b.x + (b.w - tw) // 2, b.y + (b.h - th) // 2, w.text, theme.text_on_fill, scale
            )
    elif w.kind == "field":
        fill_rect(img, b, theme.field_bg)
        stroke_rect(img, b, theme.border, 2)
        shown = typed if typed is not None else w.text
        color = theme.text if typed is not None else theme.hint
        if shown:
            _, th = font.text_size(shown, scale)
            font.draw_text(img, b.x + 8, b.y + (b.h - th) // 2, shown, color, scale)
    elif w.kind == "label":
        if w.text:
            font.draw_text(img, b.x, b.y, w.text, theme.text, scale)
    elif w.kind == "icon":
        fill_rect(img, b, theme.fill)
        stroke_rect(img, b, theme.border, 2)
        draw_shape(img, b, w.icon or "plus", theme.text_on_fill)
    elif w.kind == "list_item":
        fill_rect(img, b, theme.panel)
        fill_rect(img, Box(b.x, b.y2 - 2, b.w, 2), theme.border)
        if w.text:
            _, th = font.text_size(w.text, scale)
            font.draw_text(img, b.x + 10, b.y + (b.h - th) // 2, w.text, theme.text, scale)
    elif w.kind == "checkbox":
        fill_rect(img, b, theme.field_bg)
        stroke_rect(img, b, theme.border, 2)
        if w.style == "checked":
            fill_rect(img, _inset(b, 0.3), theme.border)
    elif w.kind == "image":
        fill_rect(img, b, theme.panel)
        stroke_rect(img, b, theme.border, 2)
        draw_shape(img, b, "cross", theme.border)
    else:
        raise ValueError(f"unknown widget kind {w.kind!r}")


def render_screen(
    spec: ScreenSpec,
    theme: Theme,
    width: int,
    height: int,
    typed: Optional[Dict[str, str]] = None,
    keyboard: bool = False,
) -> np.ndarray:
    """Render a screen spec to a BGR frame. `typed` maps field wids to entered text."""
    img = np.zeros((height, width, 3), np.uint8)
    img[:, :] = theme.bg
    typed = typed or {}
    for w in spec.widgets:
        _draw_widget(img, w, theme, typed.get(w.wid))
    if keyboard:
        draw_keyboard(img, theme)
    return img
