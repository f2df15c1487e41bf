"""Similarity of a generated test against human traces of the same usage.

States and transitions are compared as canonical *sets* (order and
multiplicity do not matter; transition identity is the full
(from, widget, action, to) tuple). Each generated test is scored against its
closest human trace, chosen by the average of the two precision components;
ties go to the lexicographically lower human id, which makes the selection
stable under permutation of the human list.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Sequence, Tuple, Union

from usagekit.generate.session import TestScript
from usagekit.irmodel.model import LabeledTrace

TransitionKey = Tuple[str, str, str, str]   # from, widget ("" for swipes), action, to


@dataclass(frozen=True)
class CanonicalSets:
    """The state/transition sets one test or trace covers."""

    source_id: str
    states: FrozenSet[str]
    transitions: FrozenSet[TransitionKey]


@dataclass(frozen=True)
class SimilarityRow:
    test_id: str
    closest_human_id: str
    precision_states: float
    precision_transitions: float
    recall_states: float
    recall_transitions: float

    def __post_init__(self) -> None:
        for v in (
            self.precision_states,
            self.precision_transitions,
            self.recall_states,
            self.recall_transitions,
        ):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"similarity metric out of [0,1]: {v}")


def script_sets(script: TestScript, source_id: str = "generated") -> CanonicalSets:
    states = [e.screen for e in script.events]
    if script.final_screen:
        states.append(script.final_screen)
    transitions = set()
    for i, e in enumerate(script.events):
        if i + 1 < len(script.events):
            to = script.events[i + 1].screen
        elif script.final_screen:
            to = script.final_screen
        else:
            continue  # destination unknown; the edge cannot be named
        transitions.add((e.screen, e.widget_canonical, e.action.value, to))
    return CanonicalSets(source_id, frozenset(states), frozenset(transitions))


def trace_sets(trace: LabeledTrace) -> CanonicalSets:
    states = [s.screen for s in trace.steps] + [trace.final_screen]
    transitions = set()
    for i, s in enumerate(trace.steps):
        to = trace.steps[i + 1].screen if i + 1 < len(trace.steps) else trace.final_screen
        transitions.add((s.screen, s.widget or "", s.action.value, to))
    return CanonicalSets(trace.recording_id, frozenset(states), frozenset(transitions))


def _coerce(item: Union[CanonicalSets, TestScript, LabeledTrace]) -> CanonicalSets:
    if isinstance(item, CanonicalSets):
        return item
    if isinstance(item, TestScript):
        return script_sets(item)
    if isinstance(item, LabeledTrace):
        return trace_sets(item)
    raise TypeError(f"cannot take canonical sets of {type(item).__name__}")


def _fraction(shared: int, denominator: int) -> float:
    return shared / denominator if denominator else 0.0


def compute_similarity(
    generated: Union[CanonicalSets, TestScript],
    humans: Sequence[Union[CanonicalSets, LabeledTrace]],
) -> SimilarityRow:
    """Score `generated` against its closest human trace.

    precision = |gen ∩ human| / |gen| and recall = |gen ∩ human| / |human|,
    computed separately over state sets and transition sets. An empty
    generated test scores 0 on all four metrics.
    """
    if not humans:
        raise ValueError("no human traces to compare against")
    gen = _coerce(generated)

    best: Tuple[float, str] = None  # (-score, id) minimized
    best_row: SimilarityRow = None
    for item in humans:
        human = _coerce(item)
        shared_states = len(gen.states & human.states)
        shared_transitions = len(gen.transitions & human.transitions)
        row = SimilarityRow(
            test_id=gen.source_id,
            closest_human_id=human.source_id,
            precision_states=_fraction(shared_states, len(gen.states)),
            precision_transitions=_fraction(shared_transitions, len(gen.transitions)),
            recall_states=_fraction(shared_states, len(human.states)),
            recall_transitions=_fraction(shared_transitions, len(human.transitions)),
        )
        score = (row.precision_states + row.precision_transitions) / 2.0
        key = (-score, human.source_id)
        if best is None or key < best:
            best = key
            best_row = row
    return best_row


def encoded_sets(
    source_id: str,
    precision_states: Tuple[int, int],
    recall_states: Tuple[int, int],
    precision_transitions: Tuple[int, int],
    recall_transitions: Tuple[int, int],
) -> Tuple[CanonicalSets, CanonicalSets]:
    """Construct a (generated, human) pair that realizes the given fractions.

    Each metric arrives as (numerator, denominator) with a shared-element
    count consistent across the pair: for precision a/b and recall c/d over
    one universe, the intersection is lcm(a, c) scaled so |gen| = b/a of it
    and |human| = d/c of it. All-zero fractions come out as disjoint
    singleton sets.
    """
    import math

    def build(prec, rec, label):
        (pa, pb), (ra, rb) = prec, rec
        if pa == 0 or ra == 0:
            # no overlap at all
            gen = frozenset({f"{label}-g0"})
            human = frozenset({f"{label}-h0"})
            return gen, human
        shared = math.lcm(pa, ra)
        gen_n = shared * pb // pa
        human_n = shared * rb // ra
        common = {f"{label}-c{i}" for i in range(shared)}
        gen = common | {f"{label}-g{i}" for i in range(gen_n - shared)}
        human = common | {f"{label}-h{i}" for i in range(human_n - shared)}
        return frozenset(gen), frozenset(human)

    gen_states, human_states = build(precision_states, recall_states, "s")
    gen_tr, human_tr = build(precision_transitions, recall_transitions, "t")
    to_key = lambda name: (name, "", "click", name)
    return (
        CanonicalSets(source_id, gen_states, frozenset(map(to_key, gen_tr))),
        CanonicalSets(f"{source_id}-human", human_states, frozenset(map(to_key, human_tr))),
    )
