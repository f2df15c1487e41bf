"""Render fixture recordings with exact ground truth, plus labeled datasets.

A recording is a frame-by-frame playback of one usage script: idle frames,
touch-indicator frames for each tap/swipe, keyboard + keystroke frames for
text entry, and screen changes driven by the app's transition table. The
ground-truth file records every touch group with its action kind, contact
point, canonical labels, and whether the typing filter should drop it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from usagekit.classify.features import screen_features, widget_features
from usagekit.classify.models import LabeledExample
from usagekit.classify.taxonomy import CanonicalTaxonomy, default_taxonomy
from usagekit.errors import FixtureError
from usagekit.fixtures.apps import (
    APP_IDS,
    FPS,
    USAGE_IDS,
    AppScript,
    UsageScript,
    UsageStep,
    build_app,
    render_app_screen,
    spec_to_widget,
)
from usagekit.fixtures.render import draw_keyboard, stamp_indicator
from usagekit.gui.abstract import abstract_screen
from usagekit.gui.group import group_elements
from usagekit.gui.segment import segment_screen
from usagekit.gui.textex import GlyphTextExtraction, TextExtraction
from usagekit.irmodel.model import LabeledTrace, TraceStep
from usagekit.tomlio import read_toml, write_toml
from usagekit.video.frames import write_recording
from usagekit.video.touch import IND_RADIUS
from usagekit.video.types import ActionKind, Frame, Recording

TRUTH_SCHEMA = "usagekit-truth v1"
FIXTURE_SCHEMA = "usagekit-fixture v1"

START_IDLE = 2
GAP_IDLE = 2
END_IDLE = 2
CLICK_OPACITIES = (1.0, 0.85, 0.7)
LONG_TAP_OPACITIES = (1.0, 0.95, 0.9, 0.85, 0.8, 0.75)
SWIPE_OPACITIES = (1.0, 1.0, 1.0, 1.0, 0.8)
KEY_OPACITIES = (1.0, 0.8)


@dataclass(frozen=True)
class TruthEvent:
    frame_index: int
    kind: ActionKind
    x: int
    y: int
    end_x: int
    end_y: int
    duration_frames: int
    filtered: bool
    screen: str    # canonical screen at event time
    widget: str    # canonical widget category; "" for swipes and keystrokes
    wid: str       # app widget id; "" for swipes and keystrokes
    text: str      # text typed right after this tap


@dataclass(frozen=True)
class RecordingTruth:
    app_id: str
    usage_id: str
    recording_id: str
    final_screen: str
    events: Tuple[TruthEvent, ...]

    @property
    def retained(self) -> Tuple[TruthEvent, ...]:
        return tuple(e for e in self.events if not e.filtered)


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 7
    fps: float = FPS
    apps: Tuple[str, ...] = APP_IDS
    usages: Tuple[str, ...] = USAGE_IDS
    unmatchable_app: str = "shopwave"
    dataset_variants: int = 3


def load_fixture_spec(path: Path | str) -> FixtureSpec:
    data = read_toml(path).get("fixture", {})
    spec = FixtureSpec(
        seed=int(data.get("seed", 7)),
        fps=float(data.get("fps", FPS)),
        apps=tuple(data.get("apps", APP_IDS)),
        usages=tuple(data.get("usages", USAGE_IDS)),
        unmatchable_app=str(data.get("unmatchable_app", "shopwave")),
        dataset_variants=int(data.get("dataset_variants", 3)),
    )
    unknown = set(spec.apps) - set(APP_IDS)
    if unknown:
        raise FixtureError(f"unknown fixture apps: {sorted(unknown)}")
    return spec


def save_fixture_spec(spec: FixtureSpec, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_toml(path, {"fixture": {
        "seed": spec.seed, "fps": spec.fps, "apps": list(spec.apps),
        "usages": list(spec.usages), "unmatchable_app": spec.unmatchable_app,
        "dataset_variants": spec.dataset_variants,
    }})
    return path


# ---------------------------------------------------------------------------
# recording playback

class _Recorder:
    def __init__(self, app: AppScript, fps: float):
        self.app = app
        self.fps = fps
        self.sid = app.initial
        self.typed: Dict[Tuple[str, str], str] = {}
        self.frames: List[np.ndarray] = []
        self.events: List[TruthEvent] = []
        self._key_centers = draw_keyboard(
            np.zeros((app.height, app.width, 3), np.uint8), app.theme
        )

    def _typed_for(self, sid: str) -> Dict[str, str]:
        return {wid: text for (s, wid), text in self.typed.items() if s == sid}

    def render(self, keyboard: bool = False) -> np.ndarray:
        return render_app_screen(
            self.app, self.sid, typed=self._typed_for(self.sid), keyboard=keyboard
        )

    def idle(self, n: int, keyboard: bool = False) -> None:
        base = self.render(keyboard=keyboard)
        for _ in range(n):
            self.frames.append(base.copy())

    def _check_point(self, x: int, y: int) -> None:
        if not (IND_RADIUS <= x < self.app.width - IND_RADIUS
                and IND_RADIUS <= y < self.app.height - IND_RADIUS):
            raise FixtureError(
                f"touch point ({x}, {y}) too close to the frame border for detection"
            )

    def touch_group(
        self,
        points: Sequence[Tuple[int, int]],
        opacities: Sequence[float],
        keyboard: bool = False,
    ) -> int:
        """Append one touch group; returns the event frame index."""
        base = self.render(keyboard=keyboard)
        first_index = len(self.frames)
        for (x, y), alpha in zip(points, opacities):
            self._check_point(x, y)
            img = base.copy()
            stamp_indicator(img, x, y, alpha)
            self.frames.append(img)
        return first_index

    def tap_point(self, step: UsageStep) -> Tuple[int, int]:
        w = self.app.screen(step.screen).widget(step.widget)
        b = w.box
        return (b.x + int(round(w.tap[0] * b.w)), b.y + int(round(w.tap[1] * b.h)))

    def play_step(self, step: UsageStep) -> None:
        if step.screen != self.sid:
            raise FixtureError(
                f"step expects screen {step.screen!r} but app is on {self.sid!r}"
            )
        if step.widget is None:
            x0, y0, x1, y1 = step.swipe
            n = len(SWIPE_OPACITIES)
            points = [
                (int(round(x0 + (x1 - x0) * i / (n - 1))),
                 int(round(y0 + (y1 - y0) * i / (n - 1))))
                for i in range(n)
            ]
            index = self.touch_group(points, SWIPE_OPACITIES)
            self.events.append(TruthEvent(
                frame_index=index, kind=step.kind,
                x=x0, y=y0, end_x=x1, end_y=y1, duration_frames=n,
                filtered=False, screen=self.sid, widget="", wid="", text="",
            ))
            self.sid = self.app.destination(self.sid, "", step.kind)
            self.idle(GAP_IDLE)
            return

        spec = self.app.screen(step.screen).widget(step.widget)
        x, y = self.tap_point(step)
        opacities = (
            LONG_TAP_OPACITIES if step.kind is ActionKind.LONG_TAP else CLICK_OPACITIES
        )
        index = self.touch_group([(x, y)] * len(opacities), opacities)
        self.events.append(TruthEvent(
            frame_index=index, kind=step.kind,
            x=x, y=y, end_x=x, end_y=y, duration_frames=len(opacities),
            filtered=False, screen=self.sid, widget=spec.canonical,
            wid=spec.wid, text=step.text,
        ))
        if step.text:
            self._type_text(step)
        self.sid = self.app.destination(self.sid, step.widget, step.kind)
        self.idle(GAP_IDLE)

    def _type_text(self, step: UsageStep) -> None:
        key = (step.screen, step.widget)
        self.typed[key] = ""
        self.idle(GAP_IDLE, keyboard=True)
        for ch in step.text:
            cx, cy = self._key_centers[ch]
            index = self.touch_group(
                [(cx, cy)] * len(KEY_OPACITIES), KEY_OPACITIES, keyboard=True
            )
            self.events.append(TruthEvent(
                frame_index=index, kind=ActionKind.CLICK,
                x=cx, y=cy, end_x=cx, end_y=cy,
                duration_frames=len(KEY_OPACITIES),
                filtered=True, screen=self.sid, widget="", wid="", text="",
            ))
            self.typed[key] += ch
            self.idle(GAP_IDLE, keyboard=True)
        # keyboard dismissed; the entered text stays visible


def record_usage(
    app: AppScript, usage_id: str, fps: float = FPS
) -> Tuple[Recording, RecordingTruth]:
    usage = app.usage(usage_id)
    rec = _Recorder(app, fps)
    rec.idle(START_IDLE)
    for step in usage.steps:
        rec.play_step(step)
    if rec.sid != usage.final_screen:
        raise FixtureError(
            f"usage {usage_id!r} of {app.app_id!r} ends on {rec.sid!r}, "
            f"expected {usage.final_screen!r}"
        )
    rec.idle(END_IDLE)

    rec_id = f"{app.app_id}-{usage_id}"
    frames = [
        Frame(index=i, image=img, timestamp_ms=i * 1000.0 / fps)
        for i, img in enumerate(rec.frames)
    ]
    recording = Recording(
        rec_id=rec_id, fps=fps, width=app.width, height=app.height,
        app_id=app.app_id, usage_id=usage_id, frames=frames,
    )
    truth = RecordingTruth(
        app_id=app.app_id, usage_id=usage_id, recording_id=rec_id,
        final_screen=app.screen(usage.final_screen).canonical,
        events=tuple(rec.events),
    )
    return recording, truth


# ---------------------------------------------------------------------------
# ground truth files

def save_truth(truth: RecordingTruth, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_toml(path, {
        "schema": TRUTH_SCHEMA,
        "recording": {
            "app_id": truth.app_id,
            "usage_id": truth.usage_id,
            "recording_id": truth.recording_id,
            "final_screen": truth.final_screen,
            "retained": len(truth.retained),
        },
        "events": [
            {
                "frame_index": e.frame_index, "kind": e.kind.value,
                "x": e.x, "y": e.y, "end_x": e.end_x, "end_y": e.end_y,
                "duration_frames": e.duration_frames, "filtered": e.filtered,
                "screen": e.screen, "widget": e.widget, "wid": e.wid,
                "text": e.text,
            }
            for e in truth.events
        ],
    })
    return path


def load_truth(path: Path | str) -> RecordingTruth:
    data = read_toml(path)
    if data.get("schema") != TRUTH_SCHEMA:
        raise FixtureError(f"unsupported truth file schema {data.get('schema')!r}")
    rec = data["recording"]
    events = tuple(
        TruthEvent(
            frame_index=int(e["frame_index"]), kind=ActionKind(e["kind"]),
            x=int(e["x"]), y=int(e["y"]),
            end_x=int(e["end_x"]), end_y=int(e["end_y"]),
            duration_frames=int(e["duration_frames"]),
            filtered=bool(e["filtered"]), screen=e["screen"],
            widget=e["widget"], wid=e["wid"], text=e["text"],
        )
        for e in data.get("events", [])
    )
    return RecordingTruth(
        app_id=rec["app_id"], usage_id=rec["usage_id"],
        recording_id=rec["recording_id"], final_screen=rec["final_screen"],
        events=events,
    )


def truth_to_trace(truth: RecordingTruth) -> LabeledTrace:
    steps = tuple(
        TraceStep(
            screen=e.screen,
            widget=e.widget or None,
            action=e.kind,
        )
        for e in truth.retained
    )
    return LabeledTrace(
        usage_id=truth.usage_id, app_id=truth.app_id,
        recording_id=truth.recording_id, steps=steps,
        final_screen=truth.final_screen,
    )


# ---------------------------------------------------------------------------
# labeled datasets

def screen_examples(
    app: AppScript,
    taxonomy: CanonicalTaxonomy,
    extractor: TextExtraction,
    source: str = "",
) -> List[LabeledExample]:
    out = []
    for sid, spec in app.screens.items():
        taxonomy.require_screen(spec.canonical)
        img = render_app_screen(app, sid)
        elements = group_elements(segment_screen(img, extractor))
        abstraction = abstract_screen(img, elements)
        fv = screen_features(img, abstraction, extractor)
        out.append(LabeledExample(
            features=fv, label=spec.canonical, app_id=app.app_id,
            source=f"{source}{app.app_id}/{sid}",
        ))
    return out


def widget_examples(
    app: AppScript, taxonomy: CanonicalTaxonomy, source: str = ""
) -> List[LabeledExample]:
    out = []
    for sid, spec in app.screens.items():
        img = render_app_screen(app, sid)
        for w in spec.widgets:
            if not w.canonical:
                continue
            taxonomy.require_widget(w.canonical)
            widget = spec_to_widget(w, img)
            fv = widget_features(widget, spec.canonical, taxonomy)
            out.append(LabeledExample(
                features=fv, label=w.canonical, app_id=app.app_id,
                source=f"{source}{app.app_id}/{sid}/{w.wid}",
            ))
    return out


def build_datasets(
    spec: FixtureSpec,
    taxonomy: Optional[CanonicalTaxonomy] = None,
    extractor: Optional[TextExtraction] = None,
) -> Tuple[List[LabeledExample], List[LabeledExample]]:
    """(screen examples, widget examples) across layout variants of each app."""
    taxonomy = taxonomy or default_taxonomy()
    extractor = extractor or GlyphTextExtraction()
    screens: List[LabeledExample] = []
    widgets: List[LabeledExample] = []
    for variant in range(spec.dataset_variants):
        for app_id in spec.apps:
            app = build_app(
                app_id, seed=spec.seed + variant,
                unmatchable=(app_id == spec.unmatchable_app),
            )
            prefix = f"v{variant}/"
            screens.extend(screen_examples(app, taxonomy, extractor, source=prefix))
            widgets.extend(widget_examples(app, taxonomy, source=prefix))
    return screens, widgets


def save_dataset(examples: Sequence[LabeledExample], out_dir: Path | str) -> Path:
    if not examples:
        raise FixtureError("refusing to write an empty dataset")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    matrix = np.stack([ex.features.values for ex in examples]).astype(np.float64)
    np.save(out_dir / "features.npy", matrix)
    write_toml(out_dir / "meta.toml", {
        "schema": examples[0].features.schema_id,
        "count": len(examples),
        "examples": [
            {"label": ex.label, "app_id": ex.app_id, "source": ex.source}
            for ex in examples
        ],
    })
    return out_dir


def load_dataset(in_dir: Path | str) -> List[LabeledExample]:
    in_dir = Path(in_dir)
    meta = read_toml(in_dir / "meta.toml")
    matrix = np.load(in_dir / "features.npy")
    rows = meta.get("examples", [])
    if matrix.shape[0] != len(rows) or len(rows) != int(meta.get("count", -1)):
        raise FixtureError(f"dataset {in_dir} is inconsistent")
    from usagekit.classify.features import FeatureVector

    return [
        LabeledExample(
            features=FeatureVector(values=matrix[i], schema_id=meta["schema"]),
            label=row["label"], app_id=row["app_id"], source=row.get("source", ""),
        )
        for i, row in enumerate(rows)
    ]


# ---------------------------------------------------------------------------
# whole-tree generation

def generate_fixture_tree(spec: FixtureSpec, out_dir: Path | str) -> dict:
    """Write apps/, recordings/, truth/, and datasets/ under out_dir."""
    from usagekit.fixtures.apps import save_app

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    recordings = []
    for app_id in spec.apps:
        app = build_app(
            app_id, seed=spec.seed, unmatchable=(app_id == spec.unmatchable_app)
        )
        save_app(app, out_dir / "apps" / f"{app_id}.toml")
        for usage_id in spec.usages:
            recording, truth = record_usage(app, usage_id, fps=spec.fps)
            write_recording(recording, out_dir / "recordings" / recording.rec_id)
            save_truth(truth, out_dir / "truth" / f"{recording.rec_id}.toml")
            recordings.append({
                "recording_id": recording.rec_id,
                "app_id": app_id,
                "usage_id": usage_id,
                "frames": len(recording.frames),
                "events": len(truth.events),
                "retained": len(truth.retained),
            })
    screens, widgets = build_datasets(spec)
    save_dataset(screens, out_dir / "datasets" / "screens")
    save_dataset(widgets, out_dir / "datasets" / "widgets")
    manifest = {
        "schema": FIXTURE_SCHEMA,
        "fixture": {
            "seed": spec.seed, "fps": spec.fps, "apps": list(spec.apps),
            "usages": list(spec.usages), "unmatchable_app": spec.unmatchable_app,
            "dataset_variants": spec.dataset_variants,
            "screen_examples": len(screens), "widget_examples": len(widgets),
        },
        "recordings": recordings,
    }
    write_toml(out_dir / "fixture.toml", manifest)
    return manifest
