"""Exception hierarchy shared by all phrasetrans modules."""

from __future__ import annotations


class PhraseTransError(Exception):
    """Base class for every error raised by this package."""


class EmptyInput(PhraseTransError, ValueError):
    """The source phrase contains no syllables."""


class PhraseTooLong(PhraseTransError, ValueError):
    def __init__(self, n: int, max_syllables: int) -> None:
        super().__init__(f"phrase has {n} syllables, limit is {max_syllables}")
        self.n = n
        self.max_syllables = max_syllables


class FormatError(PhraseTransError, ValueError):
    """Input data could not be parsed into anything usable."""


class VersionMismatch(FormatError):
    """A serialized index has the wrong magic bytes or format version."""


class EmptyQuery(PhraseTransError, ValueError):
    pass


class UnknownId(PhraseTransError, LookupError):
    pass


class CandidateExplosion(PhraseTransError, RuntimeError):
    def __init__(self, size: int, cap: int) -> None:
        super().__init__(
            f"cartesian product of {size} ad hoc translations exceeds cap {cap}"
        )
        self.size = size
        self.cap = cap


class NoMatches(PhraseTransError, ValueError):
    """Ranking was requested for an ad hoc translation with no n-gram support."""
