"""Exceptions and warnings raised across the ddr package.

Bad input or corrupt data raises a ValueError subclass. Failures of the external generator raise a GeneratorError.
Anomalies that a run can survive (duplicate identifiers, thin difficulty levels, ...) are reported through the
warnings module instead, with the Warning subclasses defined at the bottom of this module.
"""
from typing import Optional


class InvalidIdentifier(ValueError):
    """An identifier is not a well-formed dot-separated library name."""

    def __init__(self, fqn: str, reason: str):
        super().__init__(f"Invalid identifier {fqn!r}: {reason}")
        self.fqn = fqn
        self.reason = reason


class EmptyLibrary(ValueError):
    """An index was requested over a library with no items."""


class InvalidQuery(ValueError):
    """A lookup query is empty or contains the delimiter byte."""


class DelimiterPosition(ValueError):
    """A text position points at a delimiter byte rather than into an identifier."""


class EmptyCorpus(ValueError):
    """An aggregate was requested over zero samples."""


class MalformedLine(ValueError):
    """One line of a JSON Lines input could not be used."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"Line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class IndexFormatError(ValueError):
    """Base class for problems reading a serialized index."""


class BadMagic(IndexFormatError):
    pass


class UnsupportedVersion(IndexFormatError):
    pass


class TruncatedFile(IndexFormatError):
    pass


class ChecksumMismatch(IndexFormatError):
    pass


class IndexLoadError(RuntimeError):
    """The service could not load its index at startup or on reload."""


class BindError(RuntimeError):
    """The service could not bind its listening address."""


class GeneratorError(RuntimeError):
    """Base class for failures of the external candidate generator."""


class GeneratorTimeout(GeneratorError):
    pass


class GeneratorHttpError(GeneratorError):
    def __init__(self, status: int, detail: Optional[str] = None):
        super().__init__(f"Generator returned HTTP {status}" + (f": {detail}" if detail else ""))
        self.status = status


class UnparseableResponse(GeneratorError):
    pass


class DuplicateIdentifierWarning(UserWarning):
    """The same fqn appeared more than once in a library; only the first is kept."""


class ShortLevelWarning(UserWarning):
    """A difficulty level has fewer samples than requested for a test split."""


class MissingStubEntryWarning(UserWarning):
    """The stub generator has no mapping for a statement."""
