"""Deterministic synthetic apps, recordings, and datasets for testing."""
from usagekit.fixtures.apps import (
    APP_IDS,
    FPS,
    SCREEN_H,
    SCREEN_W,
    USAGE_IDS,
    AppScript,
    UsageScript,
    UsageStep,
    build_all_apps,
    build_app,
    load_app,
    render_app_screen,
    save_app,
    spec_to_widget,
    widget_class,
)
from usagekit.fixtures.generate import (
    FixtureSpec,
    RecordingTruth,
    TruthEvent,
    build_datasets,
    generate_fixture_tree,
    load_dataset,
    load_fixture_spec,
    load_truth,
    record_usage,
    save_dataset,
    save_fixture_spec,
    save_truth,
    screen_examples,
    truth_to_trace,
    widget_examples,
)
from usagekit.fixtures.render import (
    ScreenSpec,
    Theme,
    WidgetSpec,
    draw_keyboard,
    keyboard_top,
    render_screen,
    stamp_indicator,
)

__all__ = [
    "APP_IDS",
    "AppScript",
    "FPS",
    "FixtureSpec",
    "RecordingTruth",
    "SCREEN_H",
    "SCREEN_W",
    "ScreenSpec",
    "Theme",
    "TruthEvent",
    "USAGE_IDS",
    "UsageScript",
    "UsageStep",
    "WidgetSpec",
    "build_all_apps",
    "build_app",
    "build_datasets",
    "draw_keyboard",
    "generate_fixture_tree",
    "keyboard_top",
    "load_app",
    "load_dataset",
    "load_fixture_spec",
    "load_truth",
    "record_usage",
    "render_app_screen",
    "render_screen",
    "save_app",
    "save_dataset",
    "save_fixture_spec",
    "save_truth",
    "screen_examples",
    "spec_to_widget",
    "stamp_indicator",
    "truth_to_trace",
    "widget_class",
    "widget_examples",
]
