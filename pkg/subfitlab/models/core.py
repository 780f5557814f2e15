"""Core I/O models for the subfitness toolkit."""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SetKind(str, Enum):
    """Finite or cofinite subset of the naturals."""
    FINITE = "finite"
    COFINITE = "cofinite"


class PosetDocument(BaseModel):
    """JSON poset file: element count, cover pairs and optional labels."""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=0, le=64, description="Element count")
    covers: List[Tuple[int, int]] = Field(default_factory=list, description="Pairs (i, j) with i below j")
    labels: Optional[List[str]] = Field(default=None, description="Display label per element")

    @model_validator(mode="after")
    def check_indices(self) -> "PosetDocument":
        for i, j in self.covers:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"cover pair ({i}, {j}) out of range for n={self.n}")
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise ValueError(f"expected {self.n} labels, got {len(self.labels)}")
            if len(set(self.labels)) != self.n:
                raise ValueError("labels must be distinct")
        return self


class FinOrCofinDocument(BaseModel):
    """JSON form of a finite or cofinite subset of the naturals."""
    model_config = ConfigDict(extra="forbid")

    kind: SetKind
    support: List[int] = Field(default_factory=list)

    @field_validator("support")
    @classmethod
    def check_support(cls, v: List[int]) -> List[int]:
        if any(i < 0 for i in v):
            raise ValueError("support elements must be natural numbers")
        if len(set(v)) != len(v):
            raise ValueError("support must not contain duplicates")
        return sorted(v)


class CheckResult(BaseModel):
    """Outcome of one named check."""
    name: str
    passed: bool
    instances: int = Field(default=1, ge=0)
    failures: int = Field(default=0, ge=0)
    coverage: Dict[str, int] = Field(default_factory=dict)
    details: Dict[str, Any] = Field(default_factory=dict)
    counterexample: Optional[Any] = None


class SweepSummary(BaseModel):
    """Exhaustive sweep over enumerated instances."""
    check: str
    max_n: int = Field(..., ge=0)
    instances: int = Field(..., ge=0)
    failures: int = Field(..., ge=0)
    coverage: Dict[str, int] = Field(default_factory=dict)
    elapsed_ms: float = Field(..., ge=0)
    counterexample: Optional[Any] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


class RunReport(BaseModel):
    """Machine-readable report written by every CLI command."""
    command: str
    inputs: str = Field(..., description="sha256 digest of the command inputs")
    passed: bool
    results: List[CheckResult] = Field(default_factory=list)
    counterexample: Optional[Any] = None
    metrics: Dict[str, int] = Field(default_factory=dict, description="merged counters, keyed name{label=value}")
    elapsed_ms: float = Field(..., ge=0)


class ErrorResponse(BaseModel):
    """Error body for input errors and unexpected failures."""
    error: str
    error_code: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)
    error_id: Optional[str] = None
