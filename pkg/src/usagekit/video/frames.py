"""Loading and storing recordings as frame directories with a TOML manifest."""
from __future__ import annotations

import re
import shlex
import subprocess
from pathlib import Path
from typing import List, Optional

import cv2
import numpy as np

from usagekit import tomlio
from usagekit.errors import DimensionMismatch, EmptyRecording
from usagekit.video.types import Frame, Recording

MANIFEST_NAME = "recording.toml"
_FRAME_RE = re.compile(r"^(\d{4,})\.png$")


def load_frames(source: Path | str, fps: float) -> List[Frame]:
    """Read zero-padded NNNN.png files from a directory, ordered by number."""
    src = Path(source)
    entries = []
    for p in sorted(src.iterdir()) if src.is_dir() else []:
        m = _FRAME_RE.match(p.name)
        if m:
            entries.append((int(m.group(1)), p))
    if not entries:
        raise EmptyRecording(f"no NNNN.png frames under {src}")
    entries.sort(key=lambda e: e[0])
    frames: List[Frame] = []
    shape = None
    for order, (_, path) in enumerate(entries):
        img = cv2.imread(str(path), cv2.IMREAD_COLOR)
        if img is None:
            raise EmptyRecording(f"unreadable frame {path}")
        if shape is None:
            shape = img.shape
        elif img.shape != shape:
            raise DimensionMismatch(
                f"{path.name} is {img.shape[1]}x{img.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        frames.append(Frame(index=order, image=img, timestamp_ms=order * 1000.0 / fps))
    return frames


def recording_id(rec_dir: Path | str) -> str:
    """Read just the recording id from the manifest, without loading frames."""
    rec_dir = Path(rec_dir)
    manifest_path = rec_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise EmptyRecording(f"missing {MANIFEST_NAME} in {rec_dir}")
    data = tomlio.read_toml(manifest_path).get("recording", {})
    return str(data.get("id", rec_dir.name))


def load_recording(rec_dir: Path | str) -> Recording:
    """Load a frame directory plus its recording.toml manifest."""
    rec_dir = Path(rec_dir)
    manifest_path = rec_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise EmptyRecording(f"missing {MANIFEST_NAME} in {rec_dir}")
    data = tomlio.read_toml(manifest_path).get("recording", {})
    fps = float(data.get("fps", 30.0))
    frames = load_frames(rec_dir, fps)
    h, w = frames[0].image.shape[:2]
    mw, mh = int(data.get("width", w)), int(data.get("height", h))
    if (mw, mh) != (w, h):
        raise DimensionMismatch(
            f"manifest says {mw}x{mh} but frames are {w}x{h}"
        )
    return Recording(
        rec_id=str(data.get("id", rec_dir.name)),
        fps=fps,
        width=w,
        height=h,
        app_id=str(data.get("app_id", "")),
        usage_id=str(data.get("usage_id", "")),
        frames=frames,
    )


def write_recording(rec: Recording, rec_dir: Path | str) -> Path:
    """Persist frames and manifest; used by the fixture generator."""
    rec_dir = Path(rec_dir)
    rec_dir.mkdir(parents=True, exist_ok=True)
    for frame in rec.frames:
        cv2.imwrite(str(rec_dir / f"{frame.index:04d}.png"), frame.image)
    tomlio.write_toml(
        rec_dir / MANIFEST_NAME,
        {
            "recording": {
                "id": rec.rec_id,
                "fps": rec.fps,
                "width": rec.width,
                "height": rec.height,
                "app_id": rec.app_id,
                "usage_id": rec.usage_id,
                "frame_count": len(rec.frames),
            }
        },
    )
    return rec_dir


def decode_video(
    video_path: Path | str,
    out_dir: Path | str,
    decoder_cmd: str,
    fps: float,
) -> Path:
    """Shell out to a user-supplied decoder to split a video into frames.

    `decoder_cmd` is a template with {input}, {output_dir} and {fps}
    placeholders, e.g.:
        ffmpeg -i {input} -vf fps={fps} {output_dir}/%04d.png
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cmd = decoder_cmd.format(input=str(video_path), output_dir=str(out_dir), fps=fps)
    subprocess.run(shlex.split(cmd), check=True)
    return out_dir
