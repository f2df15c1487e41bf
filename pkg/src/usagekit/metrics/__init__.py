"""Evaluation metrics: similarity to human traces, success and accuracy rates."""
from usagekit.metrics.rates import (
    RateResult,
    usage_success_rate,
    widget_recommendation_accuracy,
)
from usagekit.metrics.report import CSV_COLUMNS, ReportPaths, emit_report
from usagekit.metrics.similarity import (
    CanonicalSets,
    SimilarityRow,
    compute_similarity,
    encoded_sets,
    script_sets,
    trace_sets,
)

__all__ = [
    "RateResult",
    "usage_success_rate",
    "widget_recommendation_accuracy",
    "CSV_COLUMNS",
    "ReportPaths",
    "emit_report",
    "CanonicalSets",
    "SimilarityRow",
    "compute_similarity",
    "encoded_sets",
    "script_sets",
    "trace_sets",
]
