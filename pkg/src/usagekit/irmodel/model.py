"""App-independent usage models: finite state machines over canonical screens.

States are canonical screen categories; edges carry the canonical widget that
was interacted with and the action kind. Models built from different apps can
be merged because both vocabularies are app-independent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from usagekit.classify.taxonomy import CanonicalTaxonomy, default_taxonomy
from usagekit.errors import UnknownState, UsageMismatch
from usagekit.video.types import ActionKind


@dataclass(frozen=True)
class CanonicalState:
    name: str
    is_start: bool = False
    is_end: bool = False


@dataclass(frozen=True)
class Transition:
    from_state: str
    widget: Optional[str]
    action: ActionKind
    to_state: str

    def __post_init__(self) -> None:
        if self.action.is_swipe != (self.widget is None):
            raise ValueError(
                f"transition widget must be absent exactly for swipes: "
                f"{self.widget!r} with {self.action.value}"
            )

    def sort_key(self) -> Tuple[str, str, str]:
        return (self.widget or "", self.action.value, self.to_state)


@dataclass(frozen=True)
class TraceStep:
    screen: str
    widget: Optional[str]
    action: ActionKind


@dataclass(frozen=True)
class LabeledTrace:
    usage_id: str
    app_id: str
    recording_id: str
    steps: Tuple[TraceStep, ...]
    final_screen: str


@dataclass
class IrModel:
    usage_id: str
    states: Dict[str, CanonicalState]      # keyed by name, insertion-ordered
    transitions: FrozenSet[Transition]
    provenance: List[Tuple[str, str]] = field(default_factory=list)
    taxonomy_version: str = ""

    @property
    def state_names(self) -> Tuple[str, ...]:
        return tuple(self.states)

    @property
    def start_states(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.states.values() if s.is_start)

    @property
    def end_states(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.states.values() if s.is_end)

    def edge_set(self) -> FrozenSet[Tuple[str, Optional[str], str, str]]:
        return frozenset(
            (t.from_state, t.widget, t.action.value, t.to_state)
            for t in self.transitions
        )

    def has_state(self, name: str) -> bool:
        return name in self.states


def validate_model(model: IrModel, single_trace: Optional[bool] = None) -> None:
    """Raise ValueError when a structural invariant does not hold."""
    starts = model.start_states
    if single_trace is None:
        single_trace = len(model.provenance) <= 1
    if single_trace:
        if len(starts) != 1:
            raise ValueError(f"single-trace model must have exactly one start state, got {starts}")
    elif not starts:
        raise ValueError("model has no start state")
    if not model.end_states:
        raise ValueError("model has no end state")
    for t in model.transitions:
        if t.from_state not in model.states or t.to_state not in model.states:
            raise ValueError(f"transition references unknown state: {t}")
    reachable = set(starts)
    frontier = list(starts)
    adjacency: Dict[str, List[str]] = {}
    for t in model.transitions:
        adjacency.setdefault(t.from_state, []).append(t.to_state)
    while frontier:
        current = frontier.pop()
        for nxt in adjacency.get(current, ()):
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    for end in model.end_states:
        if end not in reachable:
            raise ValueError(f"end state {end!r} unreachable from start")


def build_model(trace: LabeledTrace, taxonomy: Optional[CanonicalTaxonomy] = None) -> IrModel:
    """Fold a labeled event sequence into an FSM.

    States appear in order of first appearance; the first screen is the start
    state and the trace's final screen is the end state. Consecutive events on
    the same screen become self-transitions.
    """
    if not trace.steps:
        raise ValueError("trace has no steps")
    taxonomy = taxonomy or default_taxonomy()
    for step in trace.steps:
        taxonomy.require_screen(step.screen)
        if step.widget is not None:
            taxonomy.require_widget(step.widget)
    taxonomy.require_screen(trace.final_screen)

    order: List[str] = []
    for name in [s.screen for s in trace.steps] + [trace.final_screen]:
        if name not in order:
            order.append(name)
    states = {
        name: CanonicalState(
            name=name,
            is_start=(name == trace.steps[0].screen),
            is_end=(name == trace.final_screen),
        )
        for name in order
    }
    transitions = set()
    for i, step in enumerate(trace.steps):
        to = trace.steps[i + 1].screen if i + 1 < len(trace.steps) else trace.final_screen
        transitions.add(Transition(step.screen, step.widget, step.action, to))
    model = IrModel(
        usage_id=trace.usage_id,
        states=states,
        transitions=frozenset(transitions),
        provenance=[(trace.app_id, trace.recording_id)],
        taxonomy_version=taxonomy.version,
    )
    validate_model(model, single_trace=True)
    return model


def merge_models(models: Sequence[IrModel]) -> IrModel:
    """Union of edges across models of the same usage; start/end flags OR'd."""
    if not models:
        raise ValueError("nothing to merge")
    usage_id = models[0].usage_id
    taxonomy_version = models[0].taxonomy_version
    for m in models[1:]:
        if m.usage_id != usage_id:
            raise UsageMismatch(f"cannot merge {m.usage_id!r} into {usage_id!r}")
        if m.taxonomy_version != taxonomy_version:
            raise UsageMismatch(
                f"taxonomy version {m.taxonomy_version!r} != {taxonomy_version!r}"
            )
    states: Dict[str, CanonicalState] = {}
    transitions = set()
    provenance: List[Tuple[str, str]] = []
    for m in models:
        for state in m.states.values():
            prior = states.get(state.name)
            if prior is None:
                states[state.name] = state
            else:
                states[state.name] = CanonicalState(
                    name=state.name,
                    is_start=prior.is_start or state.is_start,
                    is_end=prior.is_end or state.is_end,
                )
        transitions.update(m.transitions)
        provenance.extend(m.provenance)
    return IrModel(
        usage_id=usage_id,
        states=states,
        transitions=frozenset(transitions),
        provenance=provenance,
        taxonomy_version=taxonomy_version,
    )


def successors(model: IrModel, state: str) -> List[Transition]:
    """Outgoing transitions of a state in deterministic (widget, action, to) order."""
    if state not in model.states:
        raise UnknownState(f"state {state!r} not in model for usage {model.usage_id!r}")
    return sorted(
        (t for t in model.transitions if t.from_state == state),
        key=Transition.sort_key,
    )
