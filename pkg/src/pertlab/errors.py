"""Exception types shared across the package."""

from __future__ import annotations


class PertlabError(Exception):
    """Base class for all package errors."""


class PolyParseError(PertlabError):
    """Raised for malformed polynomial expressions; carries the text offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class RingMismatchError(PertlabError):
    """Operands belong to different rings or truncation levels."""


class RingConstructionError(PertlabError):
    """Invalid ring data: non-prime modulus, unit generator, zero ring."""


class TruncationError(PertlabError):
    """A certificate or computation needs a higher truncation order."""


class FilterRegularityError(PertlabError):
    """An element required to be filter-regular is not."""


class ManifestError(PertlabError):
    """Malformed manifest file or unresolvable references."""
