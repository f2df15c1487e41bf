"""Device adapters: how test generation observes and drives a target app.

The scripted adapter simulates an app from an AppScript (same renderer as the
fixtures). The external adapter bridges to a child process over line-delimited
JSON so a real device driver can be attached without touching the core.
"""
from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Tuple

import cv2
import numpy as np

from usagekit.errors import AdapterError
from usagekit.fixtures.apps import AppScript, spec_to_widget, widget_class
from usagekit.fixtures.render import render_screen
from usagekit.gui.types import Box, Widget, zone_of
from usagekit.video.types import ActionKind


@dataclass(frozen=True)
class ScriptEvent:
    """One executable step of a test script."""

    screen: str                 # canonical screen label when the event fired
    widget_id: str              # adapter widget id; "" for swipes
    widget_box: Box
    widget_text: str
    widget_canonical: str       # matched category
    action: ActionKind
    text: str = ""              # typed input, if any


@dataclass
class UiNode:
    class_name: str
    text: str
    bounds: Box
    children: List["UiNode"] = field(default_factory=list)


@dataclass(frozen=True)
class AdapterWidget:
    wid: str
    widget: Widget


@dataclass
class DeviceState:
    screenshot: np.ndarray
    widgets: List[AdapterWidget]
    ui_tree: Optional[UiNode] = None
    screen_id: str = ""

    def widget_by_id(self, wid: str) -> AdapterWidget:
        for aw in self.widgets:
            if aw.wid == wid:
                return aw
        raise KeyError(wid)


class DeviceAdapter(Protocol):
    def current_state(self) -> DeviceState: ...

    def execute(self, event: ScriptEvent) -> DeviceState: ...

    def reset(self) -> DeviceState: ...


class ScriptedAdapter:
    """Drives a simulated app defined by an AppScript."""

    def __init__(self, app: AppScript):
        self.app = app
        self._sid = app.initial
        self._typed: Dict[Tuple[str, str], str] = {}

    def _render(self) -> np.ndarray:
        typed = {w: t for (s, w), t in self._typed.items() if s == self._sid}
        return render_screen(
            self.app.screen(self._sid), self.app.theme,
            self.app.width, self.app.height, typed=typed,
        )

    def _ui_tree(self, spec) -> UiNode:
        root = UiNode("Screen", "", Box(0, 0, self.app.width, self.app.height))
        containers: Dict[str, UiNode] = {}
        for w in spec.widgets:
            leaf = UiNode(widget_class(w), w.text, w.box)
            if w.parent:
                node = containers.get(w.parent)
                if node is None:
                    node = UiNode(w.parent_class or "ViewGroup", "", w.box)
                    containers[w.parent] = node
                    root.children.append(node)
                node.bounds = node.bounds.union(w.box)
                node.children.append(leaf)
            else:
                root.children.append(leaf)
        return root

    def current_state(self) -> DeviceState:
        spec = self.app.screen(self._sid)
        img = self._render()
        widgets = [AdapterWidget(w.wid, spec_to_widget(w, img)) for w in spec.widgets]
        return DeviceState(
            screenshot=img,
            widgets=widgets,
            ui_tree=self._ui_tree(spec),
            screen_id=self._sid,
        )

    def execute(self, event: ScriptEvent) -> DeviceState:
        spec = self.app.screen(self._sid)
        wid = event.widget_id
        if wid:
            try:
                spec.widget(wid)
            except KeyError:
                raise AdapterError(
                    f"screen {self._sid!r} has no widget {wid!r}"
                ) from None
            if event.text and (self._sid, wid) in self.app.text_fields:
                self._typed[(self._sid, wid)] = event.text
        self._sid = self.app.destination(self._sid, wid, event.action)
        return self.current_state()

    def reset(self) -> DeviceState:
        self._sid = self.app.initial
        self._typed = {}
        return self.current_state()


def scripted_adapter(app: AppScript) -> ScriptedAdapter:
    return ScriptedAdapter(app)


# ---------------------------------------------------------------------------
# external process bridge

def _event_to_wire(event: ScriptEvent) -> dict:
    b = event.widget_box
    return {
        "screen": event.screen,
        "widget_id": event.widget_id,
        "box": [b.x, b.y, b.w, b.h],
        "widget_text": event.widget_text,
        "canonical": event.widget_canonical,
        "action": event.action.value,
        "text": event.text,
    }


class ExternalProcessAdapter:
    """Talks to a child process: one JSON request per line, one reply per line.

    Requests: {"op": "reset"} | {"op": "current_state"} | {"op": "execute",
    "event": {...}}. Replies carry {"ok": true, "state": {"screenshot_path",
    "screen_id", "widgets": [{"wid", "box", "text", "class_type",
    "parent_class"}]}}. Screenshots travel as file paths, not inline bytes.
    """

    def __init__(self, command: List[str]):
        self.command = command
        self._proc: Optional[subprocess.Popen] = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise AdapterError(f"cannot start adapter process: {exc}") from exc
        return self._proc

    def _round_trip(self, request: dict) -> dict:
        proc = self._ensure()
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterError(f"adapter process pipe failure: {exc}") from exc
        if not line:
            raise AdapterError("adapter process closed its output")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterError(f"malformed adapter reply: {line!r}") from exc
        if not reply.get("ok"):
            raise AdapterError(f"adapter refused {request.get('op')}: {reply.get('error')}")
        return reply

    def _parse_state(self, payload: dict) -> DeviceState:
        try:
            path = payload["screenshot_path"]
            img = cv2.imread(str(path), cv2.IMREAD_COLOR)
            if img is None:
                raise AdapterError(f"cannot read screenshot {path!r}")
            widgets = []
            h, w = img.shape[:2]
            for rec in payload.get("widgets", []):
                box = Box(*[int(v) for v in rec["box"]])
                crop = img[max(box.y, 0):min(box.y2, h), max(box.x, 0):min(box.x2, w)]
                widgets.append(AdapterWidget(
                    wid=str(rec["wid"]),
                    widget=Widget(
                        box=box,
                        crop=crop.copy(),
                        class_type=rec.get("class_type", "Other"),
                        zone=zone_of(box, w, h),
                        text=rec.get("text", ""),
                        parent_class=rec.get("parent_class", ""),
                    ),
                ))
            return DeviceState(
                screenshot=img,
                widgets=widgets,
                ui_tree=None,
                screen_id=str(payload.get("screen_id", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"malformed adapter state: {exc}") from exc

    def current_state(self) -> DeviceState:
        return self._parse_state(self._round_trip({"op": "current_state"})["state"])

    def execute(self, event: ScriptEvent) -> DeviceState:
        reply = self._round_trip({"op": "execute", "event": _event_to_wire(event)})
        return self._parse_state(reply["state"])

    def reset(self) -> DeviceState:
        return self._parse_state(self._round_trip({"op": "reset"})["state"])

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        self._proc = None
