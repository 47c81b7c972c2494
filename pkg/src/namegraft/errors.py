"""Exception types raised across the package."""

from __future__ import annotations


class NamegraftError(Exception):
    """Base class for every error raised by namegraft."""


class LexiconError(NamegraftError):
    """A lexicon file is missing or malformed."""


class GeometryError(NamegraftError):
    """Invalid bounding box, grid, or attention-map arguments."""


class AlignmentError(NamegraftError):
    """Name-to-chunk alignment cannot proceed with the given inputs."""


class SubstitutionError(NamegraftError):
    """Caption rewriting cannot proceed with the given spans or names."""


class RecordError(NamegraftError):
    """An input record is unusable.

    `line_number` is 1-based when the record came from a JSONL stream;
    `image_id` is filled as soon as it could be extracted.
    """

    def __init__(self, message: str, line_number: int | None = None,
                 image_id: str | None = None):
        super().__init__(message)
        self.line_number = line_number
        self.image_id = image_id


class RecordParseError(RecordError):
    """The record line is not valid JSON."""


class RecordSchemaError(RecordError):
    """The record is missing a required field or a field has the wrong shape."""


class RecordValidationError(RecordError):
    """The record is well-formed but violates a value invariant."""


class ProviderError(NamegraftError):
    """The external face-identification service failed."""

    def __init__(self, message: str, endpoint: str | None = None,
                 image_id: str | None = None):
        super().__init__(message)
        self.endpoint = endpoint
        self.image_id = image_id


class ConfigError(NamegraftError):
    """Startup configuration is invalid or references missing files."""
