"""Data models package."""

from .core import (
    SetKind,
    PosetDocument,
    FinOrCofinDocument,
    CheckResult,
    SweepSummary,
    RunReport,
    ErrorResponse,
)

__all__ = [
    "SetKind",
    "PosetDocument",
    "FinOrCofinDocument",
    "CheckResult",
    "SweepSummary",
    "RunReport",
    "ErrorResponse",
]
