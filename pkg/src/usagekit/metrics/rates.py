"""Aggregate success and recommendation-accuracy rates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from usagekit.errors import EmptyLog
from usagekit.generate.oracle import OracleStep


@dataclass(frozen=True)
class RateResult:
    fraction: float
    hits: int
    total: int

    def __float__(self) -> float:
        return self.fraction


def _flag(result) -> bool:
    if isinstance(result, bool):
        return result
    return bool(getattr(result, "completed"))


def usage_success_rate(
    results: Union[int, Sequence], total: Optional[int] = None
) -> float:
    """Fraction of sessions that accomplished their usage.

    Either pass the oracle results (or plain accomplished flags), or the raw
    (accomplished, total) counts.
    """
    if total is not None:
        hits = int(results)
        if total <= 0:
            raise EmptyLog("no sessions to rate")
        return hits / total
    results = list(results)
    if not results:
        raise EmptyLog("no sessions to rate")
    return sum(_flag(r) for r in results) / len(results)


def _iter_steps(step_logs: Iterable) -> Iterable[OracleStep]:
    for entry in step_logs:
        if isinstance(entry, OracleStep):
            yield entry
        else:
            yield from entry


def widget_recommendation_accuracy(
    step_logs: Union[int, Iterable], total: Optional[int] = None
) -> RateResult:
    """Fraction of widget prompts whose recommendations contained the correct
    widget, with the underlying counts.

    Pass oracle step logs (flat, or one list per session), or the raw
    (hits, total) counts.
    """
    if total is not None:
        hits = int(step_logs)
        if total <= 0:
            raise EmptyLog("no steps to rate")
        return RateResult(hits / total, hits, total)
    steps = list(_iter_steps(step_logs))
    if not steps:
        raise EmptyLog("no steps to rate")
    hits = sum(s.hit for s in steps)
    return RateResult(hits / len(steps), hits, len(steps))
