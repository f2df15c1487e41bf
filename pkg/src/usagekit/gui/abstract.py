"""Color-free screen abstraction: layout boxes on a black canvas."""
from __future__ import annotations

from typing import List, Tuple

import numpy as np

from usagekit.gui.types import ElementKind, GuiElement

BLACK: Tuple[int, int, int] = (0, 0, 0)
BLUE: Tuple[int, int, int] = (255, 0, 0)      # BGR: visual elements
YELLOW: Tuple[int, int, int] = (0, 255, 255)  # BGR: textual elements


def abstract_screen(screen: np.ndarray, elements: List[GuiElement]) -> np.ndarray:
    """Black canvas with Visual boxes blue, then Textual boxes yellow on top."""
    h, w = screen.shape[:2]
    canvas = np.zeros((h, w, 3), np.uint8)
    for kind, color in ((ElementKind.VISUAL, BLUE), (ElementKind.TEXTUAL, YELLOW)):
        for el in elements:
            if el.kind is kind:
                b = el.box
                canvas[max(b.y, 0) : min(b.y2, h), max(b.x, 0) : min(b.x2, w)] = color
    return canvas
