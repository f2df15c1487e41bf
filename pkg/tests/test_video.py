"""Frame loading, touch detection, action classification, keyboard filter."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from usagekit.errors import DimensionMismatch, EmptyRecording
from usagekit.fixtures.render import draw_keyboard
from usagekit.fixtures.apps import build_app
from usagekit.fixtures.render import stamp_indicator
from usagekit.video.actions import ActionConfig, classify_action, long_tap_min_frames
from usagekit.video.frames import load_frames, load_recording, write_recording
from usagekit.video.keyboard import KeyboardConfig, detect_keyboard, keyboard_region_top
from usagekit.video.pipeline import filter_event_frames
from usagekit.video.touch import (
    TouchDetectConfig,
    detect_touch,
    group_touch_frames,
)
from usagekit.video.types import (
    ActionKind,
    EventFrame,
    Frame,
    Recording,
    TouchFrameGroup,
    TouchPoint,
    UserAction,
)

W, H = 360, 640


def blank_frame(index=0, color=(40, 40, 40)):
    img = np.zeros((H, W, 3), np.uint8)
    img[:, :] = color
    return Frame(index=index, image=img, timestamp_ms=index * 100.0)


def touch(i, x, y):
    return TouchPoint(frame_index=i, x=x, y=y, score=1.0, opacity=1.0)


# -- frames -------------------------------------------------------------------


def test_recording_roundtrip(tmp_path):
    frames = [blank_frame(i) for i in range(10)]
    rec = Recording(
        rec_id="r1", fps=30.0, width=W, height=H,
        app_id="a", usage_id="u", frames=frames,
    )
    write_recording(rec, tmp_path / "r1")
    loaded = load_recording(tmp_path / "r1")
    assert loaded.rec_id == "r1"
    assert [f.index for f in loaded.frames] == list(range(10))
    assert np.array_equal(loaded.frames[3].image, frames[3].image)


def test_load_frames_rejects_mixed_dimensions(tmp_path):
    import cv2

    cv2.imwrite(str(tmp_path / "0000.png"), np.zeros((64, 32, 3), np.uint8))
    cv2.imwrite(str(tmp_path / "0001.png"), np.zeros((32, 64, 3), np.uint8))
    with pytest.raises(DimensionMismatch):
        load_frames(tmp_path, fps=30.0)


def test_empty_recording_rejected(tmp_path):
    (tmp_path / "r").mkdir()
    with pytest.raises(EmptyRecording):
        load_recording(tmp_path / "r")


# -- touch detection ------------------------------------------------------------


def test_detect_touch_full_opacity():
    f = blank_frame()
    stamp_indicator(f.image, 100, 200, opacity=1.0)
    tp = detect_touch(f)
    assert tp is not None
    assert abs(tp.x - 100) <= 3 and abs(tp.y - 200) <= 3
    assert tp.opacity >= 0.9


def test_detect_touch_faint_indicator():
    f = blank_frame()
    stamp_indicator(f.image, 180, 400, opacity=0.3)
    tp = detect_touch(f)
    assert tp is not None
    assert 0.15 <= tp.opacity <= 0.45


def test_detect_touch_absent():
    assert detect_touch(blank_frame()) is None


def test_detect_touch_on_busy_screen():
    app = build_app("shopmart", seed=7)
    from usagekit.fixtures.render import render_screen

    img = render_screen(app.screen(app.initial), app.theme, app.width, app.height)
    f = Frame(index=0, image=img, timestamp_ms=0.0)
    assert detect_touch(f) is None
    stamp_indicator(f.image, 44, 33, opacity=0.8)
    tp = detect_touch(f)
    assert tp is not None and abs(tp.x - 44) <= 3 and abs(tp.y - 33) <= 3


# -- touch grouping ---------------------------------------------------------------


def test_group_consecutive_run():
    touches = [None] * 100
    for i in range(84, 97):
        touches[i] = touch(i, 50, 50)
    groups = group_touch_frames(touches)
    assert len(groups) == 1
    assert groups[0].event_frame_index == 84
    assert groups[0].frame_indices == list(range(84, 97))


def test_group_splits_on_gaps():
    touches = [None] * 12
    touches[5] = touch(5, 10, 10)
    touches[9] = touch(9, 10, 10)
    touches[10] = touch(10, 10, 10)
    groups = group_touch_frames(touches)
    assert [g.event_frame_index for g in groups] == [5, 9]


def test_group_no_touches():
    assert group_touch_frames([None] * 5) == []


# -- action classification ----------------------------------------------------------


def run_action(points, fps=30.0):
    return classify_action(TouchFrameGroup(touches=points), fps=fps)


def test_click():
    pts = [touch(i, 50, 50) for i in range(5)]
    assert run_action(pts).kind is ActionKind.CLICK


def test_long_tap():
    pts = [touch(i, 50, 50) for i in range(20)]
    a = run_action(pts)
    assert a.kind is ActionKind.LONG_TAP
    assert a.duration_frames == 20


def test_long_tap_threshold_is_fps_scaled():
    assert long_tap_min_frames(30.0) == 15
    assert long_tap_min_frames(10.0) == 5
    pts = [touch(i, 50, 50) for i in range(5)]
    assert run_action(pts, fps=10.0).kind is ActionKind.LONG_TAP
    pts = [touch(i, 50, 50) for i in range(4)]
    assert run_action(pts, fps=10.0).kind is ActionKind.CLICK


def test_swipe_up_and_reverse():
    ys = np.linspace(800, 300, 8)
    pts = [touch(i, 100, int(y)) for i, y in enumerate(ys)]
    assert run_action(pts).kind is ActionKind.SWIPE_UP
    rev = [touch(i, p.x, p.y) for i, p in enumerate(reversed(pts))]
    assert run_action(rev).kind is ActionKind.SWIPE_DOWN


def test_swipe_tie_breaks_horizontal():
    pts = [touch(0, 0, 0), touch(1, 100, 100)]
    assert run_action(pts).kind is ActionKind.SWIPE_RIGHT


def test_jitter_between_click_and_swipe_anchors_at_start():
    pts = [touch(0, 100, 100), touch(1, 140, 100)]  # 40 px drift
    a = run_action(pts)
    assert a.kind is ActionKind.CLICK
    assert a.start == a.end == (100, 100)


@given(
    st.lists(
        st.tuples(st.integers(0, 1000), st.integers(0, 1000)),
        min_size=2,
        max_size=12,
    )
)
def test_swipe_antisymmetry(coords):
    pts = [touch(i, x, y) for i, (x, y) in enumerate(coords)]
    rev = [touch(i, p.x, p.y) for i, p in enumerate(reversed(pts))]
    a, b = run_action(pts), run_action(rev)
    flip = {
        ActionKind.SWIPE_UP: ActionKind.SWIPE_DOWN,
        ActionKind.SWIPE_DOWN: ActionKind.SWIPE_UP,
        ActionKind.SWIPE_LEFT: ActionKind.SWIPE_RIGHT,
        ActionKind.SWIPE_RIGHT: ActionKind.SWIPE_LEFT,
    }
    if a.kind.is_swipe:
        assert b.kind is flip[a.kind]
    else:
        assert b.kind is a.kind


# -- keyboard detection ------------------------------------------------------------


def keyboard_frame():
    f = blank_frame()
    app = build_app("shopmart", seed=7)
    draw_keyboard(f.image, app.theme)
    return f


def test_detect_keyboard_on_rendered_keyboard():
    shown, conf = detect_keyboard(keyboard_frame())
    assert shown and conf > 0.5


def test_detect_keyboard_on_plain_screen():
    shown, _ = detect_keyboard(blank_frame())
    assert not shown


def test_keyboard_decision_uses_bottom_crop_only():
    f = blank_frame()
    kb = keyboard_frame()
    top = keyboard_region_top(H)
    # paste keyboard pixels in the top half, keep the bottom region blank
    f.image[: H - top, :] = kb.image[top:, :]
    shown, _ = detect_keyboard(f)
    assert not shown


# -- typing filter ------------------------------------------------------------------


def make_event(y, keyboard):
    f = keyboard_frame() if keyboard else blank_frame()
    tp = touch(0, 180, y)
    action = UserAction(ActionKind.CLICK, (180, y), (180, y), 3)
    return EventFrame(frame=f, touch=tp, action=action)


def test_field_tap_above_region_retained():
    ev = make_event(int(0.4 * H), keyboard=True)
    kept = filter_event_frames([ev])
    assert kept == [ev] and not ev.filtered


def test_key_tap_in_region_removed():
    ev = make_event(int(0.9 * H), keyboard=True)
    kept = filter_event_frames([ev])
    assert kept == [] and ev.filtered and ev.reason == "typing"


def test_region_tap_without_keyboard_retained():
    ev = make_event(int(0.9 * H), keyboard=False)
    assert filter_event_frames([ev]) == [ev]


def test_filter_never_increases_count():
    events = [make_event(int(0.9 * H), keyboard=bool(i % 2)) for i in range(6)]
    assert len(filter_event_frames(events)) <= len(events)
