"""Shared exception types."""

from __future__ import annotations


class DocharvestError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DocharvestError):
    """Input could not be parsed.

    Carries a human-readable location (JSON path or XML line) so callers
    can point at the offending part of the input.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{message} (at {location})"
        super().__init__(message)


class InvalidModel(DocharvestError):
    """A document model violates a structural invariant."""


class ConfigError(DocharvestError):
    """A configuration value or argument combination is unusable."""


class StageError(DocharvestError):
    """A pipeline stage failed irrecoverably."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"stage '{stage}': {message}")
