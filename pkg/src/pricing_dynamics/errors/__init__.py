"""Error formatting helpers."""

from .formatter import ErrorDetails, UnifiedErrorFormatter

__all__ = ["ErrorDetails", "UnifiedErrorFormatter"]
