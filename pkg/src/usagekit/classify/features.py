"""Deterministic feature encoders for screens and widgets.

These stand in for learned encoders behind the same classifier interface:
screens are summarized by where text/non-text boxes sit on an abstraction grid
plus hashed on-screen tokens; widgets by hashed label tokens, the screen they
live on, a thumbnail of their crop, their class, and their screen zone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import cv2
import numpy as np

from usagekit.classify.hashing import hashed_token_counts
from usagekit.classify.taxonomy import CanonicalTaxonomy
from usagekit.gui.abstract import BLUE, YELLOW
from usagekit.gui.textex import TextExtraction
from usagekit.gui.types import CLASS_TYPES, Widget

SCREEN_GRID = 16
SCREEN_TEXT_DIM = 256
WIDGET_TEXT_DIM = 128
CROP_SIDE = 16
SCREEN_SCHEMA = "screen-v1"


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_id: str

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature vector contains non-finite values")


def _l2(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def _grid_fractions(mask: np.ndarray, grid: int) -> np.ndarray:
    h, w = mask.shape
    ys = np.linspace(0, h, grid + 1).astype(int)
    xs = np.linspace(0, w, grid + 1).astype(int)
    out = np.zeros((grid, grid), np.float64)
    for i in range(grid):
        for j in range(grid):
            cell = mask[ys[i] : ys[i + 1], xs[j] : xs[j + 1]]
            out[i, j] = cell.mean() if cell.size else 0.0
    return out.reshape(-1)


def screen_features(
    screen: np.ndarray,
    abstraction: np.ndarray,
    text_extractor: Optional[TextExtraction],
) -> FeatureVector:
    """Occupancy of yellow/blue abstraction boxes on a 16x16 grid (512 dims)
    concatenated with 256 hashed token counts of on-screen text; each block
    L2-normalized independently."""
    yellow = np.all(abstraction == np.array(YELLOW, np.uint8), axis=2)
    blue = np.all(abstraction == np.array(BLUE, np.uint8), axis=2)
    occupancy = np.concatenate(
        [_grid_fractions(yellow, SCREEN_GRID), _grid_fractions(blue, SCREEN_GRID)]
    )
    if text_extractor is not None:
        words = text_extractor.extract(screen)
        text = " ".join(w.text for w in words)
    else:
        text = ""
    tokens = hashed_token_counts(text, SCREEN_TEXT_DIM)
    return FeatureVector(
        values=np.concatenate([_l2(occupancy), _l2(tokens)]),
        schema_id=SCREEN_SCHEMA,
    )


def widget_schema_id(taxonomy: CanonicalTaxonomy) -> str:
    return f"widget-v1-{len(taxonomy.screen_names)}sc-{taxonomy.version}"


def widget_features(
    widget: Widget, screen_category: str, taxonomy: CanonicalTaxonomy
) -> FeatureVector:
    """Hashed label tokens (128) + one-hot screen category + 16x16 gray crop
    scaled to [0,1] (256) + one-hot class type (7) + one-hot zone (9)."""
    text_block = hashed_token_counts(widget.text, WIDGET_TEXT_DIM)

    screen_block = np.zeros(len(taxonomy.screen_names), np.float64)
    screen_block[taxonomy.screen_index(screen_category)] = 1.0

    gray = cv2.cvtColor(widget.crop, cv2.COLOR_BGR2GRAY)
    thumb = cv2.resize(gray, (CROP_SIDE, CROP_SIDE), interpolation=cv2.INTER_AREA)
    crop_block = thumb.astype(np.float64).reshape(-1) / 255.0

    class_block = np.zeros(len(CLASS_TYPES), np.float64)
    class_block[CLASS_TYPES.index(widget.class_type)] = 1.0

    zone_block = np.zeros(9, np.float64)
    zone_block[widget.zone - 1] = 1.0

    return FeatureVector(
        values=np.concatenate([text_block, screen_block, crop_block, class_block, zone_block]),
        schema_id=widget_schema_id(taxonomy),
    )
