"""Text extraction backends.

`GlyphTextExtraction` reads back text rendered with the embedded bitmap font by
matching connected components against tight glyph bitmaps — exact on fixture
material. `ExternalTextExtraction` adapts any OCR engine that speaks the
line-delimited JSON protocol over stdio, so real screens can be processed by a
real engine without touching the core.
"""
from __future__ import annotations

import base64
import json
import subprocess
from dataclasses import dataclass
from typing import Dict, List, Optional, Protocol, Tuple

import cv2
import numpy as np

from usagekit.errors import TextExtractionError
from usagekit import font
from usagekit.gui.types import Box


@dataclass(frozen=True)
class TextBox:
    """One recognized word."""

    box: Box
    text: str


class TextExtraction(Protocol):
    def extract(self, image: np.ndarray) -> List[TextBox]:
        ...


# offsets of each glyph's ink inside its cell, for cell-origin recovery
_TIGHT: Dict[str, Tuple[np.ndarray, int, int]] = {
    ch: font.tight(mask) for ch, mask in font.GLYPHS.items()
}


@dataclass(frozen=True)
class _Hit:
    char: str
    cell_x: int   # cell origin, scale-normalized placement grid
    cell_y: int
    scale: int
    ink: Box


class GlyphTextExtraction:
    """Exact word recovery for screens rendered with the embedded font."""

    def __init__(self, min_scale: int = 1, max_scale: int = 6, max_color_area_frac: float = 0.5):
        self.min_scale = min_scale
        self.max_scale = max_scale
        self.max_color_area_frac = max_color_area_frac

    # -- glyph candidates ---------------------------------------------------

    def _candidate_colors(self, image: np.ndarray) -> List[np.ndarray]:
        flat = image.reshape(-1, 3).astype(np.uint32)
        packed = flat[:, 0] | (flat[:, 1] << 8) | (flat[:, 2] << 16)
        colors, counts = np.unique(packed, return_counts=True)
        limit = self.max_color_area_frac * packed.shape[0]
        keep = (counts >= 4) & (counts <= limit)
        return [
            np.array([c & 0xFF, (c >> 8) & 0xFF, (c >> 16) & 0xFF], np.uint8)
            for c in colors[keep]
        ]

    def _match_component(self, comp: np.ndarray) -> Optional[Tuple[str, int]]:
        h, w = comp.shape
        for s in range(self.min_scale, self.max_scale + 1):
            if h % s or w % s:
                continue
            blocks = comp.reshape(h // s, s, w // s, s)
            first = blocks[:, :1, :, :1]
            if not (blocks == first).all():
                continue
            pat = blocks[:, 0, :, 0]
            ch = font.lookup_pattern(pat)
            if ch is not None:
                return ch, s
        return None

    def _hits(self, image: np.ndarray) -> List[_Hit]:
        hits: List[_Hit] = []
        max_side = 7 * font.ADVANCE * self.max_scale
        for color in self._candidate_colors(image):
            mask = np.all(image == color, axis=2).astype(np.uint8)
            n, labels, stats, _ = cv2.connectedComponentsWithStats(mask, connectivity=8)
            for i in range(1, n):
                x, y, w, h, area = stats[i]
                if area < 4 or w > max_side or h > max_side:
                    continue
                comp = (labels[y : y + h, x : x + w] == i)
                matched = self._match_component(comp)
                if matched is None:
                    continue
                ch, s = matched
                _, ox, oy = _TIGHT[ch]
                hits.append(
                    _Hit(
                        char=ch,
                        cell_x=int(x) - ox * s,
                        cell_y=int(y) - oy * s,
                        scale=s,
                        ink=Box(int(x), int(y), int(w), int(h)),
                    )
                )
        return hits

    # -- word assembly ------------------------------------------------------

    def extract(self, image: np.ndarray) -> List[TextBox]:
        hits = self._hits(image)
        # glyphs of one word share scale and cell baseline and advance in x
        rows: Dict[Tuple[int, int], List[_Hit]] = {}
        for h in hits:
            rows.setdefault((h.scale, h.cell_y), []).append(h)
        words: List[TextBox] = []
        for (s, _), row in sorted(rows.items()):
            row.sort(key=lambda h: h.cell_x)
            group: List[_Hit] = []
            prev_x: Optional[int] = None
            step = font.ADVANCE * s
            for h in row:
                if prev_x is not None and h.cell_x - prev_x != step:
                    words.append(self._word(group))
                    group = []
                group.append(h)
                prev_x = h.cell_x
            if group:
                words.append(self._word(group))
        words.sort(key=lambda w: (w.box.y, w.box.x))
        return words

    @staticmethod
    def _word(group: List[_Hit]) -> TextBox:
        box = group[0].ink
        for h in group[1:]:
            box = box.union(h.ink)
        return TextBox(box=box, text="".join(h.char for h in group))


class ExternalTextExtraction:
    """Adapter for an external OCR command speaking line-delimited JSON.

    Request per image:  {"width": W, "height": H, "png_base64": "..."}
    Response:           {"words": [{"x":..,"y":..,"w":..,"h":..,"text":".."}]}
    One JSON object per line in each direction.
    """

    def __init__(self, command: List[str]):
        self.command = command

    def extract(self, image: np.ndarray) -> List[TextBox]:
        ok, png = cv2.imencode(".png", image)
        if not ok:
            raise TextExtractionError("could not encode image")
        request = json.dumps(
            {
                "width": int(image.shape[1]),
                "height": int(image.shape[0]),
                "png_base64": base64.b64encode(png.tobytes()).decode("ascii"),
            }
        )
        try:
            proc = subprocess.run(
                self.command,
                input=request + "\n",
                capture_output=True,
                text=True,
                check=True,
                timeout=120,
            )
        except (subprocess.SubprocessError, OSError) as exc:
            raise TextExtractionError(f"external extractor failed: {exc}") from exc
        line = proc.stdout.strip().splitlines()
        if not line:
            raise TextExtractionError("external extractor produced no output")
        try:
            payload = json.loads(line[-1])
            return [
                TextBox(
                    box=Box(int(w["x"]), int(w["y"]), int(w["w"]), int(w["h"])),
                    text=str(w["text"]),
                )
                for w in payload["words"]
            ]
        except (KeyError, ValueError, TypeError) as exc:
            raise TextExtractionError(f"malformed extractor response: {exc}") from exc
