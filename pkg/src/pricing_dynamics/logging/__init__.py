"""Logging utilities."""

from .structured import StructuredLogger

__all__ = ["StructuredLogger"]
