"""Exception hierarchy shared by every engine module."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(EngineError):
    """A time value or interval falls outside its permitted range."""


class OverlapError(EngineError):
    """Caption segments leave a gap or overlap instead of tiling the lesson."""


class ParseError(EngineError):
    """An input file could not be parsed; message carries line/field context."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        prefix = ""
        if path is not None:
            prefix = path if line is None else f"{path}:{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line


class BackendUnavailable(EngineError):
    """A model backend could not be reached after the configured retries."""


class WindowTooLong(EngineError):
    """A caption request exceeds the backend's maximum window length."""


class SchemaViolation(EngineError):
    """A structured response failed schema validation (after retries)."""

    def __init__(self, message: str, *, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class UnknownCode(EngineError):
    """An activity code is not part of the configured taxonomy."""


class EmptyTimestamps(EngineError):
    """Temporal entropy requires at least one timestamp."""


class EmptyUnion(EngineError):
    """Jaccard error rate is undefined when both labeled time sets are empty."""


class DependencyMissing(EngineError):
    """A job was submitted before the artifacts it depends on exist."""


class LessonNotFound(EngineError):
    """No lesson with the requested id exists in the store."""


class ArtifactNotFound(EngineError):
    """The requested artifact is not in the lesson's manifest."""


class HashMismatch(EngineError):
    """An artifact's bytes on disk no longer match its manifest hash."""
