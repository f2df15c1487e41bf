"""Touch-indicator detection by masked normalized cross-correlation.

The OS draws a fixed two-tone disk (dark ring, lighter interior) at the touch
point, fully opaque on contact and fading afterwards. Because alpha blending
scales the indicator's deviation from the background linearly, a zero-mean
matched filter over the disk support scores the indicator identically at any
opacity on locally flat backgrounds, and a least-squares slope against the
full-opacity template recovers the opacity itself.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import cv2
import numpy as np

from usagekit.video.types import Frame, TouchFrameGroup, TouchPoint

# Indicator appearance (shared with the fixture renderer).
IND_RADIUS = 20
IND_RING = 35        # ring gray level
IND_INNER = 165      # interior gray level
IND_RING_WIDTH = 5


def indicator_masks(radius: int = IND_RADIUS) -> Tuple[np.ndarray, np.ndarray]:
    """(disk, ring) boolean masks on a (2r+1)^2 grid."""
    d = 2 * radius + 1
    yy, xx = np.mgrid[0:d, 0:d]
    d2 = (yy - radius) ** 2 + (xx - radius) ** 2
    disk = d2 <= radius * radius
    ring = disk & (d2 >= (radius - IND_RING_WIDTH + 1) ** 2)
    return disk, ring


def indicator_template(radius: int = IND_RADIUS) -> Tuple[np.ndarray, np.ndarray]:
    """Gray full-opacity indicator template and its disk support mask."""
    disk, ring = indicator_masks(radius)
    tpl = np.full(disk.shape, float(IND_INNER), np.float32)
    tpl[ring] = float(IND_RING)
    return tpl, disk


@dataclass(frozen=True)
class TouchDetectConfig:
    radius: int = IND_RADIUS
    min_score: float = 0.8
    opacity_levels: Tuple[float, ...] = (1.0, 0.8, 0.6, 0.4, 0.2)
    template_bg: float = 255.0   # background the bank templates are pre-blended on
    min_patch_std: float = 3.0   # gray levels; flat windows never match


@functools.lru_cache(maxsize=8)
def _bank(config: TouchDetectConfig):
    """Zero-mean unit-norm matched filters for each opacity level, deduplicated.

    Blending tpl over a constant background scales the zero-mean pattern by the
    opacity, so after normalization the bank collapses to one kernel; the loop
    stays generic in case the appearance model ever becomes opacity-dependent.
    """
    tpl, disk = indicator_template(config.radius)
    n = int(disk.sum())
    kernels: List[np.ndarray] = []
    for level in config.opacity_levels:
        blended = level * tpl + (1.0 - level) * config.template_bg
        vals = blended[disk]
        centered = np.zeros_like(tpl)
        centered[disk] = vals - vals.mean()
        norm = float(np.sqrt((centered**2).sum()))
        if norm < 1e-9:
            continue
        k = (centered / norm).astype(np.float32)
        if not any(np.allclose(k, other, atol=1e-6) for other in kernels):
            kernels.append(k)
    return kernels, tpl, disk.astype(np.float32), disk, n


def _score_map(gray: np.ndarray, config: TouchDetectConfig) -> np.ndarray:
    kernels, _, mask_f, _, n = _bank(config)
    s1 = cv2.filter2D(gray, -1, mask_f, borderType=cv2.BORDER_CONSTANT)
    s2 = cv2.filter2D(gray * gray, -1, mask_f, borderType=cv2.BORDER_CONSTANT)
    var = np.maximum(s2 - s1 * s1 / n, 0.0)
    denom = np.sqrt(var)
    floor = np.sqrt(n) * config.min_patch_std
    best = np.full(gray.shape, -2.0, np.float32)
    for k in kernels:
        num = cv2.filter2D(gray, -1, k, borderType=cv2.BORDER_CONSTANT)
        with np.errstate(divide="ignore", invalid="ignore"):
            score = np.where(denom >= floor, num / np.maximum(denom, 1e-9), -2.0)
        best = np.maximum(best, score.astype(np.float32))
    r = config.radius
    # windows overhanging the frame edge have corrupt statistics
    best[:r, :] = -2.0
    best[-r:, :] = -2.0
    best[:, :r] = -2.0
    best[:, -r:] = -2.0
    return best


def _opacity_at(gray: np.ndarray, x: int, y: int, config: TouchDetectConfig) -> float:
    _, tpl, _, disk, _ = _bank(config)
    r = config.radius
    patch = gray[y - r : y + r + 1, x - r : x + r + 1][disk]
    t = tpl[disk]
    t0 = t - t.mean()
    slope = float(((patch - patch.mean()) * t0).sum() / (t0 * t0).sum())
    return float(np.clip(slope, 0.0, 1.0))


def detect_touch(frame: Frame, config: TouchDetectConfig = TouchDetectConfig()) -> Optional[TouchPoint]:
    """Best indicator match on one frame, or None below the score threshold."""
    gray = cv2.cvtColor(frame.image, cv2.COLOR_BGR2GRAY).astype(np.float32)
    scores = _score_map(gray, config)
    flat = int(np.argmax(scores))
    y, x = divmod(flat, scores.shape[1])
    score = float(scores[y, x])
    if score < config.min_score:
        return None
    return TouchPoint(
        frame_index=frame.index,
        x=int(x),
        y=int(y),
        score=min(score, 1.0),
        opacity=_opacity_at(gray, int(x), int(y), config),
    )


def detect_touches(
    frames: Sequence[Frame], config: TouchDetectConfig = TouchDetectConfig()
) -> List[Optional[TouchPoint]]:
    return [detect_touch(f, config) for f in frames]


def group_touch_frames(touches: Sequence[Optional[TouchPoint]]) -> List[TouchFrameGroup]:
    """Maximal runs of consecutive touch-bearing frames."""
    groups: List[TouchFrameGroup] = []
    run: List[TouchPoint] = []
    for t in touches:
        if t is None:
            if run:
                groups.append(TouchFrameGroup(run))
                run = []
        else:
            if run and t.frame_index != run[-1].frame_index + 1:
                groups.append(TouchFrameGroup(run))
                run = []
            run.append(t)
    if run:
        groups.append(TouchFrameGroup(run))
    return groups
