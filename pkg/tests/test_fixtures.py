"""Seeded fixture apps, scripted recordings, and ground-truth files."""
from __future__ import annotations

import numpy as np
import pytest

from usagekit.errors import FixtureError
from usagekit.fixtures.apps import build_app
from usagekit.fixtures.generate import (
    FixtureSpec,
    load_fixture_spec,
    load_truth,
    record_usage,
    save_truth,
    truth_to_trace,
)
from usagekit.tomlio import read_toml, write_toml
from usagekit.video.types import ActionKind


def test_record_usage_deterministic():
    runs = []
    for _ in range(2):
        app = build_app("shopmart", seed=7)
        runs.append(record_usage(app, "sign_in"))
    (rec_a, truth_a), (rec_b, truth_b) = runs
    assert truth_a == truth_b
    assert len(rec_a.frames) == len(rec_b.frames)
    for fa, fb in zip(rec_a.frames, rec_b.frames):
        assert np.array_equal(fa.image, fb.image)


def test_truth_roundtrip(tmp_path):
    _, truth = record_usage(build_app("dealhub", seed=7), "search")
    path = save_truth(truth, tmp_path / "t.toml")
    assert load_truth(path) == truth


def test_load_truth_rejects_other_schema(tmp_path):
    path = tmp_path / "bad.toml"
    write_toml(path, {"schema": "something-else", "recording": {}})
    with pytest.raises(FixtureError):
        load_truth(path)


def test_every_fixture_recording_has_four_events(truths):
    assert len(truths) == 25
    for rec_id, truth in truths.items():
        assert len(truth.events) >= 4, rec_id
        assert len(truth.retained) >= 2, rec_id
        assert truth.recording_id == rec_id


def test_app_transition_table():
    app = build_app("shopmart", seed=7)
    assert app.initial in app.screens
    dest = app.destination(app.initial, "menu", ActionKind.CLICK)
    assert dest != app.initial and dest in app.screens
    # undefined interactions keep the app where it is
    assert app.destination(app.initial, "no_such", ActionKind.CLICK) == app.initial
    assert app.text_fields, "fixture app should have editable fields"
    for sid, wid in app.text_fields:
        assert app.screen(sid).widget(wid) is not None


def test_unmatchable_variant_changes_sign_in_screen():
    plain = build_app("shopwave", seed=7)
    odd = build_app("shopwave", seed=7, unmatchable=True)
    plain_wids = {w.wid for w in plain.screen("sign_in").widgets}
    odd_wids = {w.wid for w in odd.screen("sign_in").widgets}
    assert plain_wids != odd_wids or plain.screen("sign_in") != odd.screen("sign_in")


def test_truth_to_trace_mirrors_retained_events(truths):
    truth = truths["shopmart-sign_in"]
    trace = truth_to_trace(truth)
    assert trace.usage_id == "sign_in"
    assert len(trace.steps) == len(truth.retained)
    assert trace.final_screen == truth.final_screen
    for step, ev in zip(trace.steps, truth.retained):
        assert step.screen == ev.screen
        assert (step.widget is None) == (ev.widget == "")


def test_fixture_spec_file_roundtrip(tmp_path):
    path = tmp_path / "fixture.toml"
    write_toml(path, {"fixture": {"seed": 11, "apps": ["shopmart", "cartly"]}})
    spec = load_fixture_spec(path)
    assert spec.seed == 11 and spec.apps == ("shopmart", "cartly")
    write_toml(path, {"fixture": {"apps": ["notanapp"]}})
    with pytest.raises(FixtureError):
        load_fixture_spec(path)


def test_tree_manifest_consistent(fixture_root, truths):
    manifest = read_toml(fixture_root / "fixture.toml")
    rows = manifest["recordings"]
    assert len(rows) == 25
    for row in rows:
        truth = truths[row["recording_id"]]
        assert row["events"] == len(truth.events)
        assert row["retained"] == len(truth.retained)
        assert (fixture_root / "recordings" / row["recording_id"]).is_dir()
    assert (fixture_root / "datasets" / "screens" / "features.npy").is_file()
    assert (fixture_root / "datasets" / "widgets" / "features.npy").is_file()


def test_unknown_app_rejected():
    with pytest.raises(FixtureError):
        build_app("webshop", seed=7)


def test_usage_scripts_reach_final_screen():
    app = build_app("cartly", seed=7)
    for usage in app.usages:
        sid = app.initial
        for step in usage.steps:
            assert step.screen == sid
            wid = step.widget or ""
            sid = app.destination(sid, wid, step.kind)
        assert sid == usage.final_screen
