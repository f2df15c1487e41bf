"""Ranking of on-screen widgets against the transitions a model expects next.

Three passes, cheapest evidence first:

1. structural/textual: the widget's container class implies the category
   (e.g. anything inside a ListView can be an item), or its label shares at
   least one token with the category's term list;
2. the widget classifier's top-1 category equals an expected one;
3. the expected category appears anywhere in the classifier's top-k.

Later passes only run while the candidate list is still shorter than
``rec_threshold``. Every widget is bound to at most one transition: the best
tier it reaches, preferring transitions that do not land on an end state (so
a self-transition on a text field outranks premature completion; arriving on
an end screen still completes the session at the next screen choice).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Set, Tuple

from usagekit.classify.features import widget_features
from usagekit.classify.hashing import tokenize
from usagekit.classify.models import predict_topk
from usagekit.classify.taxonomy import CanonicalTaxonomy
from usagekit.errors import NoRecommendation
from usagekit.generate.adapter import AdapterWidget, DeviceState
from usagekit.gui.types import Widget
from usagekit.irmodel.model import Transition

# Container classes that imply widget categories regardless of label text.
PARENT_MATCH_RULES: Dict[str, Tuple[str, ...]] = {
    "ListView": ("item", "menu"),
}

REC_THRESHOLD = 5


@dataclass(frozen=True)
class Recommendation:
    wid: str
    widget: Widget
    transition: Transition
    tier: int
    confidence: float
    term_score: float

    @property
    def category(self) -> str:
        return self.transition.widget or ""


def term_overlap(text: str, terms: Sequence[str]) -> Tuple[int, float]:
    """(shared token count, Jaccard score) between a label and a term list."""
    tokens = set(tokenize(text))
    vocab = set(terms)
    shared = tokens & vocab
    if not shared:
        return 0, 0.0
    return len(shared), len(shared) / float(len(tokens | vocab))


def _bind_transition(
    by_category: Dict[str, List[Transition]], category: str, end_states: Set[str]
) -> Transition:
    options = by_category[category]
    return min(
        options,
        key=lambda t: (t.to_state in end_states, t.sort_key()),
    )


def match_widgets(
    device: DeviceState,
    expected: Sequence[Transition],
    *,
    screen_category: str,
    widget_model,
    taxonomy: CanonicalTaxonomy,
    end_states: Set[str],
    rec_threshold: int = REC_THRESHOLD,
    k: int = 5,
) -> List[Recommendation]:
    """Rank device widgets against the expected outgoing transitions.

    Returns recommendations sorted by (tier, confidence desc, term score
    desc, widget id). Raises NoRecommendation when no widget survives any
    pass, or when nothing the model expects involves a widget at all.
    """
    by_category: Dict[str, List[Transition]] = {}
    for t in expected:
        if t.widget is not None:
            by_category.setdefault(t.widget, []).append(t)
    if not by_category:
        raise NoRecommendation("model expects no widget-driven transition here")
    if not device.widgets:
        raise NoRecommendation("device reports no widgets on this screen")

    categories = sorted(by_category)
    n_labels = max(len(taxonomy.widget_names), k)

    # (tier, -confidence, -term_score, wid) per widget; best category wins.
    per_tier: Dict[int, List[Recommendation]] = {1: [], 2: [], 3: []}
    for aw in device.widgets:
        fv = widget_features(aw.widget, screen_category, taxonomy)
        ranking = predict_topk(widget_model, fv, k=n_labels)
        conf = dict(ranking.entries)
        top1 = ranking.top1 if ranking.entries else ""
        topk = {name for name, _ in ranking.entries[:k]}
        implied = PARENT_MATCH_RULES.get(aw.widget.parent_class, ())

        best = None
        for c in categories:
            shared, score = term_overlap(aw.widget.text, taxonomy.widget_terms(c))
            if shared or c in implied:
                tier = 1
            elif c == top1:
                tier = 2
            elif c in topk:
                tier = 3
            else:
                continue
            key = (tier, -conf.get(c, 0.0), -score, c)
            if best is None or key < best[0]:
                best = (key, c, conf.get(c, 0.0), score)
        if best is None:
            continue
        (tier, _, _, _), category, confidence, score = best
        per_tier[tier].append(
            Recommendation(
                wid=aw.wid,
                widget=aw.widget,
                transition=_bind_transition(by_category, category, end_states),
                tier=tier,
                confidence=confidence,
                term_score=score,
            )
        )

    chosen: List[Recommendation] = list(per_tier[1])
    for tier in (2, 3):
        if len(chosen) >= rec_threshold:
            break
        chosen.extend(per_tier[tier])
    if not chosen:
        raise NoRecommendation(
            f"no widget matches the expected categories {categories}"
        )
    chosen.sort(key=lambda r: (r.tier, -r.confidence, -r.term_score, r.wid))
    return chosen
