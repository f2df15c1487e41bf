"""Leave-one-app-out evaluation of screen/widget classifiers."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from usagekit.classify.models import LabeledExample, TrainConfig, predict_topk, train
from usagekit.errors import InsufficientApps

AVERAGE_ROW = "average"


@dataclass(frozen=True)
class AccuracyRow:
    app_id: str
    k: int
    accuracy: float


def evaluate_leave_one_app_out(
    examples: Sequence[LabeledExample],
    kind: str = "knn",
    taxonomy_version: str = "unversioned",
    ks: Tuple[int, ...] = (1, 5),
    config: TrainConfig = TrainConfig(),
) -> List[AccuracyRow]:
    """Hold out each app in turn; report per-app top-k accuracy plus the macro
    average across apps (unweighted mean of per-app accuracies)."""
    apps = sorted({ex.app_id for ex in examples})
    if len(apps) < 2:
        raise InsufficientApps(
            f"leave-one-app-out needs at least 2 apps, got {len(apps)}"
        )
    per_k: Dict[int, List[float]] = {k: [] for k in ks}
    rows: List[AccuracyRow] = []
    for app in apps:
        train_set = [ex for ex in examples if ex.app_id != app]
        test_set = [ex for ex in examples if ex.app_id == app]
        model = train(train_set, kind=kind, taxonomy_version=taxonomy_version, config=config)
        for k in ks:
            hits = 0
            for ex in test_set:
                pred = predict_topk(model, ex.features, k=k)
                if ex.label in pred.labels():
                    hits += 1
            accuracy = hits / len(test_set)
            rows.append(AccuracyRow(app_id=app, k=k, accuracy=accuracy))
            per_k[k].append(accuracy)
    for k in ks:
        rows.append(AccuracyRow(AVERAGE_ROW, k, sum(per_k[k]) / len(per_k[k])))
    return rows


def write_accuracy_csv(rows: Sequence[AccuracyRow], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["app_id", "k", "accuracy"])
        for row in rows:
            writer.writerow([row.app_id, row.k, f"{row.accuracy:.6f}"])
    return path
