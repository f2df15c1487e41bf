"""Feature encoders, KNN/linear classifiers, persistence, LOO evaluation."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from usagekit.classify.evaluate import (
    AVERAGE_ROW,
    evaluate_leave_one_app_out,
    write_accuracy_csv,
)
from usagekit.classify.features import (
    FeatureVector,
    SCREEN_SCHEMA,
    screen_features,
    widget_features,
    widget_schema_id,
)
from usagekit.classify.models import (
    LabeledExample,
    TopKPrediction,
    TrainConfig,
    load_model,
    predict_topk,
    save_model,
    train,
)
from usagekit.classify.taxonomy import default_taxonomy
from usagekit.errors import (
    EmptyTrainingSet,
    InsufficientApps,
    ModelParseError,
    SchemaMismatch,
    UnknownCategory,
)
from usagekit.gui.abstract import YELLOW
from usagekit.gui.types import Box, Widget

W, H = 360, 640


def make_widget(text="SIGN IN", class_type="Button", zone=5, fill=128):
    return Widget(
        box=Box(100, 100, 60, 30),
        crop=np.full((30, 60, 3), fill, np.uint8),
        class_type=class_type,
        zone=zone,
        text=text,
    )


# -- features ------------------------------------------------------------------


def test_screen_features_black_is_zero():
    black = np.zeros((H, W, 3), np.uint8)
    fv = screen_features(black, black, None)
    assert fv.schema_id == SCREEN_SCHEMA
    assert not fv.values.any()


def test_screen_features_ignore_raw_pixels_outside_text():
    abstraction = np.zeros((H, W, 3), np.uint8)
    abstraction[100:140, 40:200] = YELLOW
    a = screen_features(np.zeros((H, W, 3), np.uint8), abstraction, None)
    b = screen_features(np.full((H, W, 3), 77, np.uint8), abstraction, None)
    assert np.array_equal(a.values, b.values)
    assert a.values.any()


def test_widget_features_deterministic():
    tax = default_taxonomy()
    a = widget_features(make_widget(), "sign_in", tax)
    b = widget_features(make_widget(), "sign_in", tax)
    assert a.schema_id == widget_schema_id(tax)
    assert np.array_equal(a.values, b.values)
    c = widget_features(make_widget(text="HELP"), "sign_in", tax)
    assert not np.array_equal(a.values, c.values)


def test_widget_features_unknown_screen_category():
    with pytest.raises(UnknownCategory):
        widget_features(make_widget(), "blog", default_taxonomy())


def test_feature_vector_rejects_nan():
    with pytest.raises(ValueError):
        FeatureVector(values=np.array([1.0, np.nan]), schema_id="x")


# -- prediction ordering --------------------------------------------------------


@given(
    st.lists(
        st.tuples(st.integers(0, 9), st.floats(0, 1, allow_nan=False)),
        min_size=1,
        max_size=10,
        unique_by=lambda t: t[0],
    )
)
def test_topk_entries_sorted_by_confidence(pairs):
    examples = [
        LabeledExample(
            features=FeatureVector(
                values=np.eye(10, dtype=np.float64)[i] * max(conf, 1e-3),
                schema_id="s",
            ),
            label=f"c{i}",
            app_id="a",
        )
        for i, conf in pairs
    ]
    model = train(examples, "knn", config=TrainConfig(k=len(examples)))
    pred = predict_topk(model, examples[0].features, k=5)
    confs = [c for _, c in pred.entries]
    assert confs == sorted(confs, reverse=True)
    assert pred.top1 == pred.labels()[0]


# -- training ---------------------------------------------------------------------


def vec(values):
    return FeatureVector(values=np.asarray(values, np.float64), schema_id="s")


def toy_examples():
    return [
        LabeledExample(vec([1, 0, 0]), "red", "app1"),
        LabeledExample(vec([0, 1, 0]), "green", "app1"),
        LabeledExample(vec([0, 0, 1]), "blue", "app2"),
        LabeledExample(vec([1, 0.1, 0]), "red", "app2"),
        LabeledExample(vec([0, 1, 0.1]), "green", "app3"),
        LabeledExample(vec([0.1, 0, 1]), "blue", "app3"),
    ]


def test_train_rejects_empty_and_mixed_schemas():
    with pytest.raises(EmptyTrainingSet):
        train([], "knn")
    mixed = [
        LabeledExample(vec([1, 0]), "a", "x"),
        LabeledExample(
            FeatureVector(values=np.zeros(3), schema_id="other"), "b", "x"
        ),
    ]
    with pytest.raises(SchemaMismatch):
        train(mixed, "knn")


def test_knn_k1_self_prediction_is_certain():
    model = train(toy_examples(), "knn", config=TrainConfig(k=1))
    pred = predict_topk(model, vec([1, 0, 0]), k=3)
    assert pred.top1 == "red"
    assert pred.entries[0][1] == pytest.approx(1.0)


def test_predict_rejects_wrong_schema():
    model = train(toy_examples(), "knn")
    with pytest.raises(SchemaMismatch):
        predict_topk(model, FeatureVector(np.zeros(3), "other"), k=1)


def test_k_larger_than_class_count_still_ranks():
    model = train(toy_examples(), "knn", config=TrainConfig(k=6))
    pred = predict_topk(model, vec([0, 0, 1]), k=10)
    assert len(pred.entries) == 3  # one entry per known class
    assert pred.top1 == "blue"


def test_linear_fits_separable_data():
    model = train(
        toy_examples(), "linear", config=TrainConfig(hidden=16, max_epochs=2000)
    )
    for ex in toy_examples():
        assert predict_topk(model, ex.features, k=1).top1 == ex.label


# -- persistence ------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["knn", "linear"])
def test_save_load_roundtrip(tmp_path, kind):
    model = train(toy_examples(), kind, taxonomy_version="fixture-1")
    path = save_model(model, tmp_path / f"{kind}.model")
    again = load_model(path)
    assert again.kind == kind
    assert again.taxonomy_version == "fixture-1"
    for ex in toy_examples():
        assert (
            predict_topk(model, ex.features, k=3).entries
            == predict_topk(again, ex.features, k=3).entries
        )
    # byte-exact persistence: saving the loaded model changes nothing
    second = save_model(again, tmp_path / f"{kind}2.model")
    assert path.read_bytes() == second.read_bytes()


def test_load_model_rejects_truncated(tmp_path):
    model = train(toy_examples(), "knn")
    path = save_model(model, tmp_path / "m.model")
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[: len(lines) // 2]))
    with pytest.raises(ModelParseError):
        load_model(path)
    with pytest.raises(ModelParseError):
        load_model(tmp_path / "missing.model")


# -- evaluation -------------------------------------------------------------------


def test_loo_needs_two_apps():
    singles = [ex for ex in toy_examples() if ex.app_id == "app1"]
    with pytest.raises(InsufficientApps):
        evaluate_leave_one_app_out(singles, "knn")


def test_loo_rows_and_csv(tmp_path):
    rows = evaluate_leave_one_app_out(toy_examples(), "knn", ks=(1, 3))
    apps = {r.app_id for r in rows}
    assert apps == {"app1", "app2", "app3", AVERAGE_ROW}
    for r in rows:
        assert 0.0 <= r.accuracy <= 1.0
    by_app = {}
    for r in rows:
        by_app.setdefault(r.app_id, {})[r.k] = r.accuracy
    for app_id, accs in by_app.items():
        assert accs[1] <= accs[3], app_id
    out = write_accuracy_csv(rows, tmp_path / "acc.csv")
    text = out.read_text()
    assert text.splitlines()[0] == "app_id,k,accuracy"
    assert AVERAGE_ROW in text
