"""Exception taxonomy shared across the package."""

from __future__ import annotations


class FcmError(Exception):
    """Base class for all fcmkit errors."""


class InputError(FcmError, ValueError):
    """An argument violates a domain invariant (range, uniqueness, convexity)."""


class ShapeError(FcmError, ValueError):
    """A state vector does not match the edge matrix dimension."""


class ResourceError(FcmError):
    """Operation refused because it would exceed a configured guard."""


class UnsupportedError(FcmError):
    """Operation is not defined for the given configuration."""


class ProviderError(FcmError):
    """LLM provider failed after the configured retries."""

    def __init__(self, message: str, *, attempts: int = 0, last_status: int | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.last_status = last_status


class FixtureError(FcmError):
    """A replay transcript is missing for the requested completion."""


class PipelineError(FcmError):
    """An extraction stage failed; carries the stage tag and its transcripts."""

    def __init__(self, message: str, *, stage: str, transcripts: tuple = ()):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.transcripts = transcripts


class IoError(FcmError, OSError):
    """Reading or writing an artifact file failed."""


class ParseError(FcmError, ValueError):
    """A persisted file is not well-formed."""


class SchemaError(FcmError, ValueError):
    """A persisted file is well-formed but violates the FCM schema."""
