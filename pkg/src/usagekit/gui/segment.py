"""Screen segmentation into Textual (word/line) and Visual (component) elements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import cv2
import numpy as np

from usagekit.gui.textex import TextBox, TextExtraction
from usagekit.gui.types import Box, ElementKind, GuiElement


@dataclass(frozen=True)
class SegmentConfig:
    bg_tolerance: int = 12        # per-channel deviation that counts as foreground
    min_component_area: int = 16  # px; smaller blobs are noise
    text_occupancy_drop: float = 0.8  # component mostly made of text ink is dropped
    line_gap_factor: float = 1.5  # horizontal merge distance, in units of word height
    line_overlap: float = 0.5     # vertical overlap fraction for same-line words


def dominant_color(image: np.ndarray) -> np.ndarray:
    """Most frequent exact color; the screen background on app material."""
    flat = image.reshape(-1, 3)
    colors, counts = np.unique(flat, axis=0, return_counts=True)
    return colors[int(np.argmax(counts))]


def merge_words_into_lines(words: List[TextBox], config: SegmentConfig) -> List[GuiElement]:
    """Greedy left-to-right merge of word boxes into text-line elements."""
    remaining = sorted(words, key=lambda t: (t.box.y, t.box.x))
    lines: List[GuiElement] = []
    for word in remaining:
        target = None
        for line in lines:
            lb, wb = line.box, word.box
            overlap = min(lb.y2, wb.y2) - max(lb.y, wb.y)
            if overlap < config.line_overlap * min(lb.h, wb.h):
                continue
            gap = wb.x - lb.x2 if wb.x >= lb.x2 else (lb.x - wb.x2)
            if gap <= config.line_gap_factor * max(lb.h, wb.h):
                target = line
                break
        if target is None:
            lines.append(GuiElement(ElementKind.TEXTUAL, word.box, word.text))
        else:
            joined = (
                target.text + " " + word.text
                if word.box.x >= target.box.x
                else word.text + " " + target.text
            )
            target.box = target.box.union(word.box)
            target.text = joined
    return lines


def segment_screen(
    image: np.ndarray,
    text_extractor: TextExtraction,
    config: SegmentConfig = SegmentConfig(),
) -> List[GuiElement]:
    """Textual line elements plus Visual connected components off the background.

    Components that are mostly text ink (the glyphs themselves) are dropped —
    the text line elements already represent them.
    """
    words = text_extractor.extract(image)
    lines = merge_words_into_lines(words, config)

    bg = dominant_color(image).astype(np.int16)
    deviation = np.abs(image.astype(np.int16) - bg).max(axis=2)
    fg = (deviation > config.bg_tolerance).astype(np.uint8)

    text_mask = np.zeros(image.shape[:2], bool)
    for line in lines:
        b = line.box
        text_mask[b.y : b.y2, b.x : b.x2] = True

    visuals: List[GuiElement] = []
    n, labels, stats, _ = cv2.connectedComponentsWithStats(fg, connectivity=8)
    for i in range(1, n):
        x, y, w, h, area = stats[i]
        if area < config.min_component_area:
            continue
        comp = labels[y : y + h, x : x + w] == i
        inside = (comp & text_mask[y : y + h, x : x + w]).sum()
        if inside >= config.text_occupancy_drop * area:
            continue
        visuals.append(GuiElement(ElementKind.VISUAL, Box(int(x), int(y), int(w), int(h))))

    visuals.sort(key=lambda e: (e.box.y, e.box.x))
    return visuals + lines
