"""HTTP service exposing recordings analysis, labeling, models, and generation."""
from usagekit.service.app import create_app
from usagekit.service.runtime import (
    JobRecord,
    LabelItem,
    LabelSession,
    Runtime,
    ServiceConfig,
    ServiceError,
)

__all__ = [
    "JobRecord",
    "LabelItem",
    "LabelSession",
    "Runtime",
    "ServiceConfig",
    "ServiceError",
    "create_app",
]
