"""Canonical taxonomy, feature extraction, and screen/widget classifiers."""
from usagekit.classify.evaluate import (
    AccuracyRow,
    evaluate_leave_one_app_out,
    write_accuracy_csv,
)
from usagekit.classify.features import (
    FeatureVector,
    screen_features,
    widget_features,
    widget_schema_id,
)
from usagekit.classify.hashing import fnv1a_64, hashed_token_counts, tokenize
from usagekit.classify.models import (
    ExternalClassifierModel,
    KnnModel,
    LabeledExample,
    LinearModel,
    TopKPrediction,
    TrainConfig,
    load_model,
    predict_topk,
    save_model,
    train,
)
from usagekit.classify.taxonomy import (
    CanonicalTaxonomy,
    ScreenCategory,
    WidgetCategory,
    default_taxonomy,
    load_taxonomy,
    save_taxonomy,
    taxonomy_from_dict,
)

__all__ = [
    "AccuracyRow",
    "CanonicalTaxonomy",
    "ExternalClassifierModel",
    "FeatureVector",
    "KnnModel",
    "LabeledExample",
    "LinearModel",
    "ScreenCategory",
    "TopKPrediction",
    "TrainConfig",
    "WidgetCategory",
    "default_taxonomy",
    "evaluate_leave_one_app_out",
    "fnv1a_64",
    "hashed_token_counts",
    "load_model",
    "load_taxonomy",
    "predict_topk",
    "save_model",
    "save_taxonomy",
    "screen_features",
    "taxonomy_from_dict",
    "tokenize",
    "train",
    "widget_features",
    "widget_schema_id",
    "write_accuracy_csv",
]
