"""
Error types for recforge.

Exceptions are raised for invalid input and exceeded limits. Searches that
may legitimately come back empty-handed return a SearchFailure value instead,
so callers can try the next parameter without unwinding.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional


class RecforgeError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(RecforgeError, ValueError):
    """Invalid argument or violated precondition."""


class ResourceLimitError(RecforgeError):
    """A configured cap (cells, modulus, node budget, ...) was exceeded."""

    def __init__(
        self,
        stage: str,
        parameter: str,
        limit: Any,
        value: Any = None,
        message: Optional[str] = None,
    ):
        self.stage = stage
        self.parameter = parameter
        self.limit = limit
        self.value = value
        text = message or f"{stage}: {parameter}={value} exceeds limit {limit}"
        super().__init__(text)


class DocumentError(RecforgeError):
    """A certificate document could not be parsed."""


@dataclass(frozen=True)
class SearchFailure:
    """
    Negative outcome of a search.

    Args:
        stage: Pipeline stage that gave up (e.g. 'dimension', 'choose_alpha')
        reason: Short machine-readable reason
        details: Parameters that explain the failure (limits, partial coverage)
    """

    stage: str
    reason: str
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return False

    def describe(self) -> str:
        extras = ", ".join(f"{key}={value}" for key, value in sorted(self.details.items()))
        return f"{self.stage}: {self.reason}" + (f" ({extras})" if extras else "")
