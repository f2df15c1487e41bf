"""Shared fixtures: one synthetic fixture tree, trained classifiers, and one
full extraction pass, all built once per session and reused everywhere."""
from __future__ import annotations

import shutil
import time
from pathlib import Path

import pytest

from usagekit.analyze import analyze_recording
from usagekit.classify.models import TrainConfig, save_model, train
from usagekit.classify.taxonomy import default_taxonomy
from usagekit.fixtures.generate import (
    FixtureSpec,
    generate_fixture_tree,
    load_dataset,
    load_truth,
)
from usagekit.video.pipeline import read_events_json


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


@pytest.fixture(scope="session")
def fixture_root(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("fixtures")
    generate_fixture_tree(FixtureSpec(seed=7), root)
    return root


@pytest.fixture(scope="session")
def truths(fixture_root):
    """rec_id -> ground truth, for every fixture recording."""
    return {
        p.stem: load_truth(p)
        for p in sorted((fixture_root / "truth").glob("*.toml"))
    }


@pytest.fixture(scope="session")
def screen_dataset(fixture_root):
    return load_dataset(fixture_root / "datasets" / "screens")


@pytest.fixture(scope="session")
def widget_dataset(fixture_root):
    return load_dataset(fixture_root / "datasets" / "widgets")


@pytest.fixture(scope="session")
def knn_classifiers(screen_dataset, widget_dataset, taxonomy):
    cfg = TrainConfig(seed=7)
    screen = train(
        screen_dataset, "knn", taxonomy_version=taxonomy.version, config=cfg
    )
    widget = train(
        widget_dataset, "knn", taxonomy_version=taxonomy.version, config=cfg
    )
    return screen, widget


@pytest.fixture(scope="session")
def classifier_dir(tmp_path_factory, knn_classifiers) -> Path:
    d = tmp_path_factory.mktemp("classifiers")
    save_model(knn_classifiers[0], d / "screen.model")
    save_model(knn_classifiers[1], d / "widget.model")
    return d


@pytest.fixture(scope="session")
def extraction(tmp_path_factory, fixture_root):
    """Frame pipeline over every fixture recording, run once.

    Returns (analyzed_root, per-recording event records, per-recording
    wall-clock seconds). The analyzed trees keep the service layout
    (<root>/<rec_id>/events.json ...) so other fixtures can copy them.
    """
    root = tmp_path_factory.mktemp("analyzed")
    events = {}
    elapsed = {}
    for rec_dir in sorted((fixture_root / "recordings").iterdir()):
        t0 = time.perf_counter()
        summary = analyze_recording(rec_dir, root / rec_dir.name)
        elapsed[rec_dir.name] = time.perf_counter() - t0
        assert summary["recording_id"] == rec_dir.name
        events[rec_dir.name] = read_events_json(root / rec_dir.name / "events.json")
    return root, events, elapsed


@pytest.fixture(scope="session")
def prepared_data_root(tmp_path_factory, extraction, classifier_dir):
    """A data-root template with classifiers and two analyzed sign-in
    recordings; tests copy it so mutations stay isolated."""
    analyzed_root, _, _ = extraction
    template = tmp_path_factory.mktemp("data-template")
    shutil.copytree(classifier_dir, template / "classifiers")
    for rec_id in ("shopmart-sign_in", "dealhub-sign_in"):
        shutil.copytree(
            analyzed_root / rec_id,
            template / "assets" / "recordings" / rec_id,
        )
    return template


@pytest.fixture()
def data_root(tmp_path, prepared_data_root) -> Path:
    dest = tmp_path / "data"
    shutil.copytree(prepared_data_root, dest)
    return dest
