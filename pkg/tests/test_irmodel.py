"""Usage-model construction, merging, serialization and the model database."""
from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from usagekit.errors import (
    ModelParseError,
    NoModelForUsage,
    UnknownCategory,
    UnknownState,
    UsageMismatch,
)
from usagekit.irmodel.model import (
    IrModel,
    LabeledTrace,
    TraceStep,
    Transition,
    build_model,
    merge_models,
    successors,
)
from usagekit.irmodel.store import ModelDb, deserialize_model, serialize_model
from usagekit.video.types import ActionKind

CLICK = ActionKind.CLICK


def trace(steps, final, usage="sign_in", app="shopmart", rec="r1"):
    return LabeledTrace(
        usage_id=usage,
        app_id=app,
        recording_id=rec,
        steps=tuple(TraceStep(*s) for s in steps),
        final_screen=final,
    )


def test_build_minimal_model():
    m = build_model(trace([("home", "menu", CLICK)], "sign_in"))
    assert m.state_names == ("home", "sign_in")
    assert m.start_states == ("home",)
    assert m.end_states == ("sign_in",)
    assert m.edge_set() == {("home", "menu", "click", "sign_in")}


def test_build_self_transitions():
    m = build_model(
        trace(
            [("sign_in", "username", CLICK), ("sign_in", "password", CLICK)],
            "sign_in",
        )
    )
    assert m.state_names == ("sign_in",)
    assert m.states["sign_in"].is_start and m.states["sign_in"].is_end
    assert m.edge_set() == {
        ("sign_in", "username", "click", "sign_in"),
        ("sign_in", "password", "click", "sign_in"),
    }


def test_build_revisited_screen_single_state():
    m = build_model(
        trace(
            [("home", "search", CLICK), ("search_results", "item", CLICK)],
            "home",
            usage="search",
        )
    )
    assert m.state_names == ("home", "search_results")
    assert m.states["home"].is_start and m.states["home"].is_end


def test_build_rejects_unknown_categories():
    with pytest.raises(UnknownCategory):
        build_model(trace([("blog", "menu", CLICK)], "sign_in"))
    with pytest.raises(UnknownCategory):
        build_model(trace([("home", "hamburger", CLICK)], "sign_in"))
    with pytest.raises(ValueError):
        build_model(trace([], "sign_in"))


def test_transition_widget_swipe_pairing():
    with pytest.raises(ValueError):
        Transition("home", None, ActionKind.CLICK, "home")
    with pytest.raises(ValueError):
        Transition("home", "menu", ActionKind.SWIPE_UP, "home")
    Transition("home", None, ActionKind.SWIPE_UP, "home")  # fine


def test_merge_rejects_usage_mismatch():
    a = build_model(trace([("home", "menu", CLICK)], "sign_in"))
    b = build_model(
        trace([("home", "search", CLICK)], "search_results", usage="search")
    )
    with pytest.raises(UsageMismatch):
        merge_models([a, b])


def test_merge_unions_edges_and_flags():
    a = build_model(trace([("home", "menu", CLICK)], "sign_in", app="shopmart"))
    b = build_model(
        trace(
            [("sign_in", "username", CLICK)], "sign_in", app="dealhub", rec="r2"
        )
    )
    m = merge_models([a, b])
    assert m.edge_set() == a.edge_set() | b.edge_set()
    assert set(m.start_states) == {"home", "sign_in"}
    assert m.end_states == ("sign_in",)
    assert m.provenance == [("shopmart", "r1"), ("dealhub", "r2")]


def test_successors_sorted_and_unknown_state():
    m = build_model(
        trace(
            [("home", "search", CLICK), ("search_results", None, ActionKind.SWIPE_UP)],
            "search_results",
            usage="search",
        )
    )
    outs = successors(m, "search_results")
    assert [t.to_state for t in outs] == ["search_results"]
    with pytest.raises(UnknownState):
        successors(m, "shopping_cart")


# -- merge algebra (the heavyweight version lives in the acceptance suite) ------

screens = st.sampled_from(["home", "sign_in", "search_results", "shopping_cart"])
widgets = st.sampled_from(["menu", "search", "item", "cart"])


@st.composite
def models(draw):
    n = draw(st.integers(1, 4))
    steps = [
        TraceStep(draw(screens), draw(widgets), CLICK) for _ in range(n)
    ]
    return build_model(
        LabeledTrace(
            usage_id="search",
            app_id=draw(st.sampled_from(["a", "b", "c"])),
            recording_id=f"r{draw(st.integers(0, 99))}",
            steps=tuple(steps),
            final_screen=draw(screens),
        )
    )


def same_fsm(a: IrModel, b: IrModel) -> bool:
    return (
        a.edge_set() == b.edge_set()
        and set(a.start_states) == set(b.start_states)
        and set(a.end_states) == set(b.end_states)
    )


@given(models(), models())
def test_merge_commutative_and_unions(a, b):
    ab, ba = merge_models([a, b]), merge_models([b, a])
    assert same_fsm(ab, ba)
    assert ab.edge_set() == a.edge_set() | b.edge_set()
    assert same_fsm(merge_models([a, a]), a)


@given(models(), models(), models())
def test_merge_associative(a, b, c):
    left = merge_models([merge_models([a, b]), c])
    right = merge_models([a, merge_models([b, c])])
    assert same_fsm(left, right)


# -- serialization ------------------------------------------------------------


def sample_model():
    return merge_models([
        build_model(
            trace(
                [("home", "menu", CLICK), ("sign_in", "username", CLICK)],
                "sign_in",
            )
        ),
        build_model(
            trace(
                [("home", None, ActionKind.SWIPE_DOWN), ("home", "menu", CLICK)],
                "sign_in",
                app="dealhub",
                rec="r2",
            )
        ),
    ])


def test_serialize_roundtrip():
    m = sample_model()
    text = serialize_model(m)
    again = deserialize_model(text)
    assert again.usage_id == m.usage_id
    assert again.taxonomy_version == m.taxonomy_version
    assert again.states == m.states
    assert again.transitions == m.transitions
    assert again.provenance == m.provenance
    assert serialize_model(again) == text


def test_deserialize_rejects_garbage():
    text = serialize_model(sample_model())
    with pytest.raises(ModelParseError):
        deserialize_model("not a model\n")
    truncated = "\n".join(text.splitlines()[:4])
    with pytest.raises(ModelParseError):
        deserialize_model(truncated)


def test_deserialize_rejects_unreachable_end():
    bad = (
        "usagekit-irmodel v1\n"
        "usage: sign_in\n"
        "taxonomy: fixture-1\n"
        "provenance: a/r1\n"
        "STATES\n"
        "home 1 0\n"
        "help 0 1\n"
        "TRANSITIONS\n"
        "home - swipe_up home\n"
    )
    with pytest.raises(ModelParseError):
        deserialize_model(bad)


# -- model database -------------------------------------------------------------


def test_db_store_load_list(tmp_path):
    db = ModelDb(tmp_path / "db")
    a = build_model(trace([("home", "menu", CLICK)], "sign_in"))
    b = build_model(
        trace([("home", "search", CLICK)], "search_results", usage="search")
    )
    id_a, id_b = db.store(a), db.store(b)
    assert id_a.startswith("m-") and len(id_a) == 14
    assert db.store(a) == id_a  # content-addressed: same model, same id
    assert len(db.list_models()) == 2
    assert [i.model_id for i in db.list_models("sign_in")] == [id_a]
    loaded = db.load(id_a)
    assert loaded.edge_set() == a.edge_set()
    with pytest.raises(KeyError):
        db.load("m-000000000000")


def test_db_merged_model_refreshes(tmp_path):
    db = ModelDb(tmp_path / "db")
    a = build_model(trace([("home", "menu", CLICK)], "sign_in"))
    db.store(a)
    merged = db.merged_model("sign_in")
    assert merged.edge_set() == a.edge_set()
    b = build_model(
        trace([("sign_in", "username", CLICK)], "sign_in", app="dealhub", rec="r2")
    )
    db.store(b)
    refreshed = db.merged_model("sign_in")
    assert refreshed.edge_set() == a.edge_set() | b.edge_set()
    # second read comes from the on-disk cache and is identical
    assert serialize_model(db.merged_model("sign_in")) == serialize_model(refreshed)
    with pytest.raises(NoModelForUsage):
        db.merged_model("open_help")
