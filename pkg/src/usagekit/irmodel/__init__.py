"""Finite-state usage models over canonical screens, plus the model database."""
from usagekit.irmodel.model import (
    CanonicalState,
    IrModel,
    LabeledTrace,
    TraceStep,
    Transition,
    build_model,
    merge_models,
    successors,
    validate_model,
)
from usagekit.irmodel.store import (
    ModelDb,
    ModelInfo,
    deserialize_model,
    serialize_model,
)

__all__ = [
    "CanonicalState",
    "IrModel",
    "LabeledTrace",
    "ModelDb",
    "ModelInfo",
    "TraceStep",
    "Transition",
    "build_model",
    "deserialize_model",
    "merge_models",
    "serialize_model",
    "successors",
    "validate_model",
]
