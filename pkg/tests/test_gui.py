"""Text extraction, segmentation, grouping, target selection, abstraction."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from usagekit.errors import NoTargetWidget
from usagekit.fixtures.apps import build_app
from usagekit.fixtures.render import ScreenSpec, WidgetSpec, render_screen
from usagekit.gui.abstract import BLUE, YELLOW, abstract_screen
from usagekit.gui.events import build_gui_event
from usagekit.gui.group import group_elements, vertically_collocated
from usagekit.gui.segment import segment_screen
from usagekit.gui.target import select_touched_widget
from usagekit.gui.textex import GlyphTextExtraction
from usagekit.gui.types import Box, ElementKind, GuiElement, zone_of
from usagekit.video.types import ActionKind, EventFrame, Frame, TouchPoint, UserAction

W, H = 360, 640


@pytest.fixture(scope="module")
def theme():
    return build_app("shopmart", seed=7).theme


@pytest.fixture(scope="module")
def extractor():
    return GlyphTextExtraction()


def two_button_screen(theme):
    spec = ScreenSpec(
        sid="s",
        canonical="home",
        widgets=[
            WidgetSpec("b1", "button", Box(40, 100, 160, 44), text="SIGN IN"),
            WidgetSpec("b2", "button", Box(40, 200, 160, 44), text="HELP"),
        ],
    )
    return render_screen(spec, theme, W, H), spec


# -- text extraction ---------------------------------------------------------


def test_glyph_extraction_reads_rendered_labels(theme, extractor):
    img, _ = two_button_screen(theme)
    words = {w.text for w in extractor.extract(img)}
    assert {"SIGN", "IN", "HELP"} <= words


def test_glyph_extraction_empty_on_blank(extractor):
    assert extractor.extract(np.zeros((64, 64, 3), np.uint8)) == []


# -- segmentation ----------------------------------------------------------------


def test_segment_finds_labeled_buttons(theme, extractor):
    img, spec = two_button_screen(theme)
    elements = group_elements(segment_screen(img, extractor))
    textual = [e for e in elements if e.text]
    assert len(textual) >= 2
    for w in spec.widgets:
        holder = [e for e in elements if e.box.intersects(w.box)]
        assert holder, f"no element over {w.wid}"
        assert any(w.text.split()[0] in e.text for e in holder)


def test_segment_black_screen_empty(extractor):
    assert segment_screen(np.zeros((H, W, 3), np.uint8), extractor) == []


def test_segment_lone_icon_is_visual(theme, extractor):
    spec = ScreenSpec(
        sid="s", canonical="home",
        widgets=[WidgetSpec("i", "icon", Box(150, 150, 48, 48), icon="bars")],
    )
    img = render_screen(spec, theme, W, H)
    elements = segment_screen(img, extractor)
    assert len(elements) == 1
    assert elements[0].kind is ElementKind.VISUAL
    assert elements[0].box.intersects(Box(150, 150, 48, 48))


# -- grouping -----------------------------------------------------------------------


def visual(x, y, w, h):
    return GuiElement(ElementKind.VISUAL, Box(x, y, w, h))


def textual(x, y, w, h, text):
    return GuiElement(ElementKind.TEXTUAL, Box(x, y, w, h), text)


def test_checkbox_absorbs_its_label():
    box = visual(40, 494, 16, 16)
    label = textual(64, 496, 120, 12, "SHOW PASSWORD")
    merged = group_elements([box, label])
    assert merged[0].box == Box(40, 494, 16, 16).union(label.box)
    assert merged[0].text == "SHOW PASSWORD"
    assert merged[0].kind is ElementKind.VISUAL
    # the textual element itself is carried through untouched
    assert merged[1].box == label.box and merged[1].text == label.text


def test_visual_with_visual_neighbor_unchanged():
    a, b = visual(40, 494, 16, 16), visual(64, 494, 16, 16)
    merged = group_elements([a, b])
    assert merged[0].box == a.box and merged[0].text == ""


def test_far_label_not_absorbed():
    box = visual(40, 300, 16, 16)
    label = textual(40, 500, 120, 12, "FAR AWAY")
    merged = group_elements([box, label])
    assert merged[0].box == box.box and merged[0].text == ""


def test_same_row_but_across_screen_not_absorbed():
    box = visual(10, 300, 16, 16)
    label = textual(300, 302, 50, 12, "REMOTE")
    assert not vertically_collocated(box.box, label.box, 0.5)
    assert group_elements([box, label])[0].text == ""


boxes_st = st.builds(
    Box,
    st.integers(0, 300), st.integers(0, 600),
    st.integers(1, 100), st.integers(1, 60),
)


@given(st.lists(
    st.tuples(st.sampled_from(["v", "t"]), boxes_st), min_size=1, max_size=8
))
def test_grouping_never_shrinks_and_never_merges_text(items):
    elements = [
        GuiElement(
            ElementKind.VISUAL if k == "v" else ElementKind.TEXTUAL,
            b,
            "" if k == "v" else "X",
        )
        for k, b in items
    ]
    merged = group_elements(elements)
    assert len(merged) == len(elements)
    for before, after in zip(elements, merged):
        assert after.box.contains_box(before.box)
        if before.kind is ElementKind.TEXTUAL:
            assert after.box == before.box and after.text == before.text


# -- target selection -----------------------------------------------------------


def els(*boxes):
    return [GuiElement(ElementKind.VISUAL, b) for b in boxes]


def test_touch_inside_single_box():
    elements = els(Box(10, 10, 50, 50), Box(200, 200, 50, 50))
    assert select_touched_widget(elements, 30, 30) is elements[0]


def test_touch_8px_outside_selects_after_one_expansion():
    elements = els(Box(100, 100, 40, 40))
    assert select_touched_widget(elements, 92, 120) is elements[0]


def test_coarse_container_eliminated():
    form = Box(50, 50, 200, 200)
    field = Box(90, 90, 60, 30)
    elements = els(form, field)
    assert select_touched_widget(elements, 100, 100) is elements[1]


def test_nothing_within_reach():
    with pytest.raises(NoTargetWidget):
        select_touched_widget(els(Box(0, 0, 10, 10)), 500, 500)
    with pytest.raises(NoTargetWidget):
        select_touched_widget([], 5, 5)


def test_zone_numbering():
    assert zone_of(Box(0, 0, 10, 10), 360, 640) == 1
    assert zone_of(Box(350, 630, 10, 10), 360, 640) == 9
    assert zone_of(Box(175, 315, 10, 10), 360, 640) == 5


@given(boxes_st)
def test_zone_in_range(box):
    assert 1 <= zone_of(box, 360, 640) <= 9


# -- abstraction --------------------------------------------------------------------


def test_abstraction_colors_and_shape(theme, extractor):
    img, _ = two_button_screen(theme)
    elements = segment_screen(img, extractor)
    abstract = abstract_screen(img, elements)
    assert abstract.shape == img.shape
    colors = {tuple(c) for c in abstract.reshape(-1, 3)}
    assert colors <= {(0, 0, 0), BLUE, YELLOW}
    assert YELLOW in colors


def test_abstraction_empty_elements_black():
    img = np.full((H, W, 3), 200, np.uint8)
    assert not abstract_screen(img, []).any()


def test_abstraction_idempotent(theme, extractor):
    img, _ = two_button_screen(theme)
    elements = segment_screen(img, extractor)
    first = abstract_screen(img, elements)
    assert np.array_equal(first, abstract_screen(first, elements))


# -- event assembly -----------------------------------------------------------------


def make_event_frame(img, kind, x, y):
    return EventFrame(
        frame=Frame(index=0, image=img, timestamp_ms=0.0),
        touch=TouchPoint(0, x, y, 1.0, 1.0),
        action=UserAction(kind, (x, y), (x, y), 3),
        clean_image=img,
    )


def test_build_gui_event_click(theme, extractor):
    img, spec = two_button_screen(theme)
    elements = group_elements(segment_screen(img, extractor))
    b = spec.widgets[0].box
    ev = make_event_frame(img, ActionKind.CLICK, *map(int, b.center))
    ge = build_gui_event(ev, elements)
    assert ge.widget is not None
    assert ge.widget.box.intersects(b)
    assert 1 <= ge.widget.zone <= 9
    assert ge.widget.class_type


def test_build_gui_event_swipe_has_no_widget(theme, extractor):
    img, _ = two_button_screen(theme)
    elements = segment_screen(img, extractor)
    ev = make_event_frame(img, ActionKind.SWIPE_UP, 180, 320)
    assert build_gui_event(ev, elements).widget is None
