"""On-screen keyboard detection over the bottom region of a frame.

The default classifier is feature-based: an 8x8 edge-activity grid (keyboards
put ink in nearly every cell) combined with the periodicity of vertical key
borders (many evenly spaced column clusters). It is pluggable so a learned
model can replace it behind the same interface.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Protocol, Tuple

import cv2
import numpy as np

from usagekit.video.types import Frame


@dataclass(frozen=True)
class KeyboardConfig:
    region_fraction: float = 0.35      # bottom fraction of the screen inspected
    grid: int = 8
    cell_density_floor: float = 0.012  # min edge fraction for a cell to count
    cell_coverage_min: float = 0.7     # fraction of active cells required
    min_edge_columns: int = 8          # evenly spaced vertical-line clusters
    spacing_cv_max: float = 0.3        # coefficient of variation of spacings
    column_peak_fraction: float = 0.3  # column counts as a line above this
    cluster_gap: int = 8               # columns this close merge into one line
    edge_threshold: float = 60.0       # |Sobel| level that counts as an edge


class KeyboardClassifier(Protocol):
    def classify(self, crop: np.ndarray) -> Tuple[bool, float]:
        """(is_keyboard, confidence in [0,1]) for a bottom-region crop."""
        ...


class GridPeriodicityClassifier:
    """Heuristic keyboard classifier; see module docstring."""

    def __init__(self, config: KeyboardConfig = KeyboardConfig()):
        self.config = config

    def _column_clusters(self, vertical: np.ndarray) -> List[float]:
        cfg = self.config
        profile = vertical.mean(axis=0)
        peaks = np.nonzero(profile >= cfg.column_peak_fraction)[0]
        clusters: List[float] = []
        run: List[int] = []
        for c in peaks:
            if run and c - run[-1] > cfg.cluster_gap:
                clusters.append(float(np.mean(run)))
                run = []
            run.append(int(c))
        if run:
            clusters.append(float(np.mean(run)))
        return clusters

    def classify(self, crop: np.ndarray) -> Tuple[bool, float]:
        cfg = self.config
        gray = cv2.cvtColor(crop, cv2.COLOR_BGR2GRAY).astype(np.float32)
        gx = np.abs(cv2.Sobel(gray, cv2.CV_32F, 1, 0, ksize=3))
        gy = np.abs(cv2.Sobel(gray, cv2.CV_32F, 0, 1, ksize=3))
        edges = (gx > cfg.edge_threshold) | (gy > cfg.edge_threshold)

        h, w = edges.shape
        g = cfg.grid
        ys = np.linspace(0, h, g + 1).astype(int)
        xs = np.linspace(0, w, g + 1).astype(int)
        active = 0
        for i in range(g):
            for j in range(g):
                cell = edges[ys[i] : ys[i + 1], xs[j] : xs[j + 1]]
                if cell.size and cell.mean() >= cfg.cell_density_floor:
                    active += 1
        coverage = active / float(g * g)

        clusters = self._column_clusters(gx > cfg.edge_threshold)
        if len(clusters) >= 2:
            spacings = np.diff(clusters)
            cv_ratio = float(spacings.std() / spacings.mean()) if spacings.mean() > 0 else 10.0
        else:
            cv_ratio = 10.0
        periodic = len(clusters) >= cfg.min_edge_columns and cv_ratio <= cfg.spacing_cv_max

        period_score = min(1.0, len(clusters) / cfg.min_edge_columns) * max(
            0.0, 1.0 - min(cv_ratio, 1.0)
        )
        confidence = 0.5 * min(1.0, coverage / cfg.cell_coverage_min) + 0.5 * period_score
        decision = coverage >= cfg.cell_coverage_min and periodic
        return decision, float(np.clip(confidence, 0.0, 1.0))


def keyboard_region_top(height: int, config: KeyboardConfig = KeyboardConfig()) -> int:
    """First row of the inspected bottom region."""
    return height - int(round(config.region_fraction * height))


def detect_keyboard(
    frame: Frame | np.ndarray,
    config: KeyboardConfig = KeyboardConfig(),
    classifier: Optional[KeyboardClassifier] = None,
) -> Tuple[bool, float]:
    """Decide whether the bottom region of the frame shows a keyboard."""
    image = frame.image if isinstance(frame, Frame) else frame
    crop = image[keyboard_region_top(image.shape[0], config) :, :]
    clf = classifier if classifier is not None else GridPeriodicityClassifier(config)
    return clf.classify(crop)
