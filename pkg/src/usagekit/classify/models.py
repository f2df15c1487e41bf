"""KNN and linear classifiers over feature vectors, with textual persistence.

Model files are versioned plain text (header + parameters as decimal floats via
repr), so round-trips are byte-exact and diffs are reviewable.
"""
from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from usagekit.classify.features import FeatureVector
from usagekit.errors import EmptyTrainingSet, ModelParseError, SchemaMismatch

FORMAT_HEADER = "usagekit-model v1"


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    label: str
    app_id: str
    source: str = ""


@dataclass(frozen=True)
class TopKPrediction:
    entries: Tuple[Tuple[str, float], ...]

    def labels(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    @property
    def top1(self) -> str:
        return self.entries[0][0]


@dataclass
class KnnModel:
    schema_id: str
    taxonomy_version: str
    k: int
    metric: str
    X: np.ndarray            # (n, d)
    labels: List[str]
    apps: List[str] = field(default_factory=list)
    kind: str = "knn"

    def class_scores(self, values: np.ndarray) -> Dict[str, float]:
        norms = np.linalg.norm(self.X, axis=1)
        vnorm = float(np.linalg.norm(values))
        with np.errstate(divide="ignore", invalid="ignore"):
            sims = (self.X @ values) / (norms * vnorm)
        sims = np.nan_to_num(sims, nan=0.0)
        dist = 1.0 - sims
        order = sorted(range(len(dist)), key=lambda i: (dist[i], i))[: self.k]
        weights = {i: 1.0 / (dist[i] + 1e-8) for i in order}
        total = sum(weights.values())
        scores: Dict[str, float] = {label: 0.0 for label in set(self.labels)}
        for i in order:
            scores[self.labels[i]] += weights[i] / total
        return {label: float(v) for label, v in scores.items()}


@dataclass
class LinearModel:
    schema_id: str
    taxonomy_version: str
    classes: List[str]
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    seed: int
    epochs_run: int
    apps: List[str] = field(default_factory=list)
    kind: str = "linear"

    def _forward(self, X: np.ndarray) -> np.ndarray:
        hidden = np.maximum(X @ self.W1 + self.b1, 0.0)
        logits = hidden @ self.W2 + self.b2
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def class_scores(self, values: np.ndarray) -> Dict[str, float]:
        probs = self._forward(values.reshape(1, -1))[0]
        return {c: float(p) for c, p in zip(self.classes, probs)}


Model = KnnModel | LinearModel


@dataclass(frozen=True)
class TrainConfig:
    k: int = 5
    metric: str = "cosine"
    hidden: int = 128
    learning_rate: float = 0.5
    max_epochs: int = 5000
    tolerance: float = 1e-6
    seed: int = 7


def _check_examples(examples: Sequence[LabeledExample]) -> str:
    if not examples:
        raise EmptyTrainingSet("no labeled examples")
    schema = examples[0].features.schema_id
    dims = examples[0].features.values.shape[0]
    for ex in examples:
        if ex.features.schema_id != schema or ex.features.values.shape[0] != dims:
            raise SchemaMismatch(
                f"example schema {ex.features.schema_id!r} != {schema!r}"
            )
    return schema


def train(
    examples: Sequence[LabeledExample],
    kind: str = "knn",
    taxonomy_version: str = "unversioned",
    config: TrainConfig = TrainConfig(),
) -> Model:
    schema = _check_examples(examples)
    X = np.stack([ex.features.values for ex in examples]).astype(np.float64)
    labels = [ex.label for ex in examples]
    apps = sorted({ex.app_id for ex in examples})

    if kind == "knn":
        return KnnModel(
            schema_id=schema,
            taxonomy_version=taxonomy_version,
            k=config.k,
            metric=config.metric,
            X=X,
            labels=labels,
            apps=apps,
        )
    if kind == "linear":
        return _train_linear(X, labels, schema, taxonomy_version, apps, config)
    raise ValueError(f"unknown classifier kind {kind!r}")


def _train_linear(
    X: np.ndarray,
    labels: List[str],
    schema: str,
    taxonomy_version: str,
    apps: List[str],
    config: TrainConfig,
) -> LinearModel:
    classes = sorted(set(labels))
    y = np.array([classes.index(l) for l in labels])
    n, d = X.shape
    c = len(classes)
    rng = np.random.default_rng(config.seed)
    W1 = rng.normal(0.0, 0.01, size=(d, config.hidden))
    b1 = np.zeros(config.hidden)
    W2 = rng.normal(0.0, 0.01, size=(config.hidden, c))
    b2 = np.zeros(c)

    onehot = np.zeros((n, c))
    onehot[np.arange(n), y] = 1.0
    prev_loss = np.inf
    epochs_run = 0
    for epoch in range(config.max_epochs):
        hidden_pre = X @ W1 + b1
        hidden = np.maximum(hidden_pre, 0.0)
        logits = hidden @ W2 + b2
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        probs = e / e.sum(axis=1, keepdims=True)
        loss = float(-np.log(np.clip(probs[np.arange(n), y], 1e-12, None)).mean())

        grad_logits = (probs - onehot) / n
        grad_W2 = hidden.T @ grad_logits
        grad_b2 = grad_logits.sum(axis=0)
        grad_hidden = grad_logits @ W2.T
        grad_hidden[hidden_pre <= 0.0] = 0.0
        grad_W1 = X.T @ grad_hidden
        grad_b1 = grad_hidden.sum(axis=0)

        W1 -= config.learning_rate * grad_W1
        b1 -= config.learning_rate * grad_b1
        W2 -= config.learning_rate * grad_W2
        b2 -= config.learning_rate * grad_b2
        epochs_run = epoch + 1
        if abs(prev_loss - loss) < config.tolerance:
            break
        prev_loss = loss

    return LinearModel(
        schema_id=schema,
        taxonomy_version=taxonomy_version,
        classes=classes,
        W1=W1,
        b1=b1,
        W2=W2,
        b2=b2,
        seed=config.seed,
        epochs_run=epochs_run,
        apps=apps,
    )


def predict_topk(model, features: FeatureVector, k: int = 5) -> TopKPrediction:
    """Ranked (category, confidence) entries; ties broken by category name."""
    if features.schema_id != model.schema_id:
        raise SchemaMismatch(
            f"feature schema {features.schema_id!r} != model {model.schema_id!r}"
        )
    scores = model.class_scores(features.values)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return TopKPrediction(entries=tuple(ranked[:k]))


class ExternalClassifierModel:
    """Adapter for an external scorer over the line-delimited JSON protocol.

    Request:  {"schema": "...", "features": [...]}
    Response: {"confidences": {"category": fraction, ...}}
    """

    kind = "external"

    def __init__(self, command: List[str], schema_id: str, taxonomy_version: str = ""):
        self.command = command
        self.schema_id = schema_id
        self.taxonomy_version = taxonomy_version

    def class_scores(self, values: np.ndarray) -> Dict[str, float]:
        request = json.dumps({"schema": self.schema_id, "features": values.tolist()})
        proc = subprocess.run(
            self.command, input=request + "\n", capture_output=True, text=True, check=True
        )
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        return {str(k): float(v) for k, v in payload["confidences"].items()}


# ---------------------------------------------------------------------------
# persistence

def _write_matrix(lines: List[str], name: str, m: np.ndarray) -> None:
    m2 = np.atleast_2d(m)
    lines.append(f"matrix {name} {m2.shape[0]} {m2.shape[1]}")
    for row in m2:
        lines.append(" ".join(repr(float(v)) for v in row))


def save_model(model: Model, path: Path | str) -> Path:
    lines = [
        FORMAT_HEADER,
        f"kind: {model.kind}",
        f"schema: {model.schema_id}",
        f"taxonomy: {model.taxonomy_version}",
        f"apps: {','.join(model.apps)}",
    ]
    if isinstance(model, KnnModel):
        lines.append(f"k: {model.k}")
        lines.append(f"metric: {model.metric}")
        lines.append(f"count: {len(model.labels)}")
        for label in model.labels:
            lines.append(f"label: {label}")
        _write_matrix(lines, "X", model.X)
    else:
        lines.append(f"classes: {' '.join(model.classes)}")
        lines.append(f"seed: {model.seed}")
        lines.append(f"epochs: {model.epochs_run}")
        for name in ("W1", "b1", "W2", "b2"):
            _write_matrix(lines, name, getattr(model, name))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class _Reader:
    def __init__(self, lines: List[str]):
        self.lines = lines
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise ModelParseError("unexpected end of model file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect_field(self, name: str) -> str:
        line = self.next()
        prefix = f"{name}: "
        if line == f"{name}:":
            return ""
        if not line.startswith(prefix):
            raise ModelParseError(f"expected field {name!r}, got {line!r}")
        return line[len(prefix):]

    def matrix(self, name: str) -> np.ndarray:
        head = self.next().split()
        if len(head) != 4 or head[0] != "matrix" or head[1] != name:
            raise ModelParseError(f"expected matrix {name!r}")
        rows, cols = int(head[2]), int(head[3])
        data = np.empty((rows, cols), np.float64)
        for r in range(rows):
            parts = self.next().split()
            if len(parts) != cols:
                raise ModelParseError(f"matrix {name!r} row {r} has {len(parts)} values")
            data[r] = [float(p) for p in parts]
        return data


def load_model(path: Path | str) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelParseError(str(exc)) from exc
    reader = _Reader([l for l in text.splitlines()])
    try:
        if reader.next() != FORMAT_HEADER:
            raise ModelParseError("unrecognized model file header")
        kind = reader.expect_field("kind")
        schema = reader.expect_field("schema")
        taxonomy = reader.expect_field("taxonomy")
        apps = [a for a in reader.expect_field("apps").split(",") if a]
        if kind == "knn":
            k = int(reader.expect_field("k"))
            metric = reader.expect_field("metric")
            count = int(reader.expect_field("count"))
            labels = [reader.expect_field("label") for _ in range(count)]
            X = reader.matrix("X")
            if X.shape[0] != count:
                raise ModelParseError("exemplar count does not match matrix")
            return KnnModel(
                schema_id=schema, taxonomy_version=taxonomy, k=k, metric=metric,
                X=X, labels=labels, apps=apps,
            )
        if kind == "linear":
            classes = reader.expect_field("classes").split()
            seed = int(reader.expect_field("seed"))
            epochs = int(reader.expect_field("epochs"))
            W1 = reader.matrix("W1")
            b1 = reader.matrix("b1")[0]
            W2 = reader.matrix("W2")
            b2 = reader.matrix("b2")[0]
            return LinearModel(
                schema_id=schema, taxonomy_version=taxonomy, classes=classes,
                W1=W1, b1=b1, W2=W2, b2=b2, seed=seed, epochs_run=epochs, apps=apps,
            )
        raise ModelParseError(f"unknown model kind {kind!r}")
    except (ValueError, IndexError) as exc:
        raise ModelParseError(f"malformed model file: {exc}") from exc
