"""Exception hierarchy for the subfitness toolkit."""

from typing import Any, Dict, Optional


class SubfitLabError(Exception):
    """Base exception for all toolkit errors."""

    error_code = "SUBFITLAB_ERROR"

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        if error_code is not None:
            self.error_code = error_code
        self.details = details or {}


class InvalidInputError(SubfitLabError):
    """Malformed input document or argument."""

    error_code = "INVALID_INPUT"


class CycleDetectedError(InvalidInputError):
    """Cover pairs contain a cycle, so their closure is not antisymmetric."""

    error_code = "CYCLE_DETECTED"


class MissingTopError(SubfitLabError):
    """A top (absorbing) element is required but absent."""

    error_code = "MISSING_TOP"


class MissingBottomError(SubfitLabError):
    """A bottom element is required but absent."""

    error_code = "MISSING_BOTTOM"


class NotComparableError(SubfitLabError):
    """A witness was requested for u <= v."""

    error_code = "NOT_COMPARABLE"


class PreconditionViolatedError(SubfitLabError):
    """The inputs violate an operation's stated precondition."""

    error_code = "PRECONDITION_VIOLATED"


class NotDistributiveError(PreconditionViolatedError):
    """A distributive lattice was required."""

    error_code = "NOT_DISTRIBUTIVE"


class PropertyCheckFailedError(SubfitLabError):
    """An internal postcondition failed; signals a construction bug."""

    error_code = "PROPERTY_CHECK_FAILED"


class NotAnEmbeddingError(SubfitLabError):
    """A map is not a bound-preserving join embedding."""

    error_code = "NOT_AN_EMBEDDING"


class ConditionsNotMetError(SubfitLabError):
    """Transfer requested for an embedding without conditions (a) and (b)."""

    error_code = "CONDITIONS_NOT_MET"


class NotOpenError(SubfitLabError):
    """A point set is not open (not a specialization downset)."""

    error_code = "NOT_OPEN"


class BadInclusionError(SubfitLabError):
    """Open sets were expected to be nested."""

    error_code = "BAD_INCLUSION"


class NotInAError(SubfitLabError):
    """A finite/cofinite set is not an element of the semilattice A."""

    error_code = "NOT_IN_A"
