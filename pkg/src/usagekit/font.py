"""A tiny 5x7 bitmap font.

Every glyph is a single 8-connected ink component and every glyph has a unique
tight (cropped-to-ink) bitmap, so rendered text can be read back exactly by
component matching. Rendering is nearest-neighbour only; no anti-aliasing.
"""
from __future__ import annotations

from typing import Dict, Optional, Tuple

import numpy as np

GLYPH_W = 5
GLYPH_H = 7
ADVANCE = 6  # glyph cell plus one blank column

_RAW = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".###.", "#...#", "#....", ".###.", "....#", "#...#", ".###."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"),
    "3": (".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    ".": (".....", ".....", ".....", ".....", ".....", ".##..", ".##.."),
    "-": (".....", ".....", ".....", ".###.", ".....", ".....", "....."),
    "_": (".....", ".....", ".....", ".....", ".....", ".....", "#####"),
    "/": ("....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."),
    "@": (".###.", "#...#", "#.###", "#.#.#", "#.##.", "#....", ".###."),
    "&": (".##..", "#..#.", "#.#..", ".#...", "#.#.#", "#..#.", ".##.#"),
    "+": (".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."),
    "'": ("..#..", "..#..", ".....", ".....", ".....", ".....", "....."),
}


def _to_mask(rows: Tuple[str, ...]) -> np.ndarray:
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


GLYPHS: Dict[str, np.ndarray] = {ch: _to_mask(rows) for ch, rows in _RAW.items()}

SUPPORTED = set(GLYPHS) | {" "}


def tight(mask: np.ndarray) -> Tuple[np.ndarray, int, int]:
    """Crop a boolean mask to its ink. Returns (cropped, x_offset, y_offset)."""
    ys, xs = np.nonzero(mask)
    y0, y1 = ys.min(), ys.max()
    x0, x1 = xs.min(), xs.max()
    return mask[y0 : y1 + 1, x0 : x1 + 1], int(x0), int(y0)


def _build_lookup() -> Dict[Tuple[int, int, bytes], str]:
    table: Dict[Tuple[int, int, bytes], str] = {}
    for ch, mask in GLYPHS.items():
        pat, _, _ = tight(mask)
        key = (pat.shape[0], pat.shape[1], np.packbits(pat).tobytes())
        if key in table:  # pragma: no cover - guarded by tests
            raise ValueError(f"glyphs {table[key]!r} and {ch!r} collide")
        table[key] = ch
    return table


TIGHT_LOOKUP: Dict[Tuple[int, int, bytes], str] = _build_lookup()


def lookup_pattern(pat: np.ndarray) -> Optional[str]:
    """Return the character whose tight bitmap equals `pat`, if any."""
    key = (pat.shape[0], pat.shape[1], np.packbits(pat).tobytes())
    return TIGHT_LOOKUP.get(key)


def normalize_text(text: str) -> str:
    """Uppercase and drop characters the font cannot draw."""
    out = []
    for ch in text.upper():
        if ch in SUPPORTED:
            out.append(ch)
    return "".join(out)


def text_size(text: str, scale: int = 1) -> Tuple[int, int]:
    """Full cell size of a rendered string (not ink-tight)."""
    text = normalize_text(text)
    if not text:
        return 0, 0
    w = (len(text) * ADVANCE - (ADVANCE - GLYPH_W)) * scale
    return w, GLYPH_H * scale


def draw_text(
    img: np.ndarray, x: int, y: int, text: str, color, scale: int = 1
) -> Optional[Tuple[int, int, int, int]]:
    """Draw `text` with its cell origin at (x, y). Returns the ink bbox.

    The bbox is (x0, y0, w, h) of actually-inked pixels, or None if the string
    had no drawable ink. Pixels outside the image are clipped.
    """
    text = normalize_text(text)
    h_img, w_img = img.shape[:2]
    ink_x0 = ink_y0 = 10 ** 9
    ink_x1 = ink_y1 = -1
    cx = x
    for ch in text:
        if ch != " ":
            big = np.kron(GLYPHS[ch], np.ones((scale, scale), dtype=bool))
            gh, gw = big.shape
            # clip the glyph cell against the image
            y0, x0 = max(y, 0), max(cx, 0)
            y1, x1 = min(y + gh, h_img), min(cx + gw, w_img)
            if y0 < y1 and x0 < x1:
                sub = big[y0 - y : y1 - y, x0 - cx : x1 - cx]
                if sub.any():
                    img[y0:y1, x0:x1][sub] = color
                    ys, xs = np.nonzero(sub)
                    ink_x0 = min(ink_x0, x0 + int(xs.min()))
                    ink_y0 = min(ink_y0, y0 + int(ys.min()))
                    ink_x1 = max(ink_x1, x0 + int(xs.max()))
                    ink_y1 = max(ink_y1, y0 + int(ys.max()))
        cx += ADVANCE * scale
    if ink_x1 < 0:
        return None
    return ink_x0, ink_y0, ink_x1 - ink_x0 + 1, ink_y1 - ink_y0 + 1
