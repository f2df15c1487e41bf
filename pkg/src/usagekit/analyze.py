"""One-call driver from a recording directory to an analyzed artifact tree."""
from __future__ import annotations

from pathlib import Path
from typing import Optional

import cv2

from usagekit.gui.events import extract_gui_events, write_gui_events
from usagekit.gui.textex import GlyphTextExtraction, TextExtraction
from usagekit.video.frames import load_recording
from usagekit.video.pipeline import AnalysisConfig, extract_events, write_events_json


def analyze_recording(
    rec_dir: Path | str,
    out_dir: Path | str,
    extractor: Optional[TextExtraction] = None,
    config: Optional[AnalysisConfig] = None,
) -> dict:
    """Extract touch events and GUI triples from ``rec_dir`` into ``out_dir``.

    Writes events.json, gui_events.json, crops/, abstract/, one clean
    pre-touch screen per retained event under screens/, and final.png.
    Returns a summary with the recording id and event counts.
    """
    if extractor is None:
        extractor = GlyphTextExtraction()
    rec = load_recording(rec_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events = extract_events(rec, config)
    write_events_json(events, out / "events.json")
    gui_events = extract_gui_events(events, extractor)
    write_gui_events(gui_events, out)
    screens = out / "screens"
    screens.mkdir(exist_ok=True)
    for ge in gui_events:
        cv2.imwrite(str(screens / f"{ge.index:04d}.png"), ge.screen)
    cv2.imwrite(str(out / "final.png"), rec.frames[-1].image)
    return {
        "recording_id": rec.rec_id,
        "events": len(events),
        "retained": len(gui_events),
    }
