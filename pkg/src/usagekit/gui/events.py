"""Event frames → GUI event triples, plus gui_events.json and image outputs."""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional

import cv2
import numpy as np

from usagekit.gui.abstract import abstract_screen
from usagekit.gui.classes import infer_class_type
from usagekit.gui.group import group_elements
from usagekit.gui.segment import SegmentConfig, segment_screen
from usagekit.gui.target import select_touched_widget
from usagekit.gui.textex import TextExtraction
from usagekit.gui.types import GuiElement, GuiEvent, Widget, zone_of
from usagekit.video.pipeline import action_to_dict
from usagekit.video.types import EventFrame


def element_to_widget(
    el: GuiElement, screen: np.ndarray, parent_class: str = ""
) -> Widget:
    h, w = screen.shape[:2]
    b = el.box
    crop = screen[max(b.y, 0) : min(b.y2, h), max(b.x, 0) : min(b.x2, w)].copy()
    return Widget(
        box=b,
        crop=crop,
        class_type=infer_class_type(el, screen, parent_class),
        zone=zone_of(b, w, h),
        text=el.text,
        parent_class=parent_class,
    )


def build_gui_event(event: EventFrame, elements: List[GuiElement]) -> GuiEvent:
    """(screen, widget, action) for one unfiltered event frame.

    The screen raster is the indicator-free neighbour of the event frame so
    the blended touch indicator cannot surface as a phantom widget.
    """
    screen = event.clean_image if event.clean_image is not None else event.frame.image
    widget: Optional[Widget] = None
    if not event.action.kind.is_swipe:
        el = select_touched_widget(elements, event.touch.x, event.touch.y)
        widget = element_to_widget(el, screen)
    return GuiEvent(
        index=event.frame.index,
        screen=screen,
        widget=widget,
        action=event.action,
        abstract=abstract_screen(screen, elements),
        element_count=len(elements),
    )


def extract_gui_events(
    events: List[EventFrame],
    text_extractor: TextExtraction,
    config: SegmentConfig = SegmentConfig(),
) -> List[GuiEvent]:
    """Segment each kept event's screen and build its triple."""
    out: List[GuiEvent] = []
    for ev in events:
        if ev.filtered:
            continue
        screen = ev.clean_image if ev.clean_image is not None else ev.frame.image
        elements = group_elements(segment_screen(screen, text_extractor, config))
        out.append(build_gui_event(ev, elements))
    return out


def write_gui_events(gui_events: List[GuiEvent], out_dir: Path | str) -> Path:
    """gui_events.json plus crops/NNNN.png and abstract/NNNN.png."""
    out_dir = Path(out_dir)
    (out_dir / "crops").mkdir(parents=True, exist_ok=True)
    (out_dir / "abstract").mkdir(parents=True, exist_ok=True)
    records = []
    for ge in gui_events:
        name = f"{ge.index:04d}.png"
        cv2.imwrite(str(out_dir / "abstract" / name), ge.abstract)
        widget_rec = None
        if ge.widget is not None:
            cv2.imwrite(str(out_dir / "crops" / name), ge.widget.crop)
            b = ge.widget.box
            widget_rec = {
                "crop": f"crops/{name}",
                "box": {"x": b.x, "y": b.y, "w": b.w, "h": b.h},
                "class_type": ge.widget.class_type,
                "zone": ge.widget.zone,
                "text": ge.widget.text,
            }
        records.append(
            {
                "frame_index": ge.index,
                "action": action_to_dict(ge.action),
                "widget": widget_rec,
                "abstract": f"abstract/{name}",
                "element_count": ge.element_count,
            }
        )
    path = out_dir / "gui_events.json"
    path.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return path
