"""Normalization and tokenization for source phrases and target text.

Both sides are NFC-composed and case-folded so that dictionary headwords,
n-gram words and user queries agree on token identity regardless of how
diacritics were encoded.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import EmptyInput, PhraseTooLong

DEFAULT_MAX_SYLLABLES = 5


def _fold(text: str) -> str:
    # casefold can emit decomposed sequences, so compose again afterwards.
    return unicodedata.normalize("NFC", unicodedata.normalize("NFC", text).casefold())


@dataclass(frozen=True)
class SourcePhrase:
    syllables: tuple[str, ...]
    raw: str

    @property
    def text(self) -> str:
        return " ".join(self.syllables)

    def __len__(self) -> int:
        return len(self.syllables)


def split_syllables(raw: str) -> tuple[str, ...]:
    """Fold ``raw`` and split it on whitespace, with no length checks."""
    return tuple(_fold(raw).split())


def normalize_word(raw: str) -> str:
    """Canonical form of a (possibly multi-syllable) source word."""
    return " ".join(split_syllables(raw))


def normalize_source(raw: str, max_syllables: int = DEFAULT_MAX_SYLLABLES) -> SourcePhrase:
    """Turn a raw source-language string into a :class:`SourcePhrase`.

    Raises:
        EmptyInput: ``raw`` has no non-whitespace characters.
        PhraseTooLong: more than ``max_syllables`` syllables.
    """
    if max_syllables < 1:
        raise ValueError("max_syllables must be positive")
    syllables = split_syllables(raw)
    if not syllables:
        raise EmptyInput("phrase is empty")
    if len(syllables) > max_syllables:
        raise PhraseTooLong(len(syllables), max_syllables)
    return SourcePhrase(syllables, raw)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punct(word: str) -> str:
    start, end = 0, len(word)
    while start < end and _is_punct(word[start]):
        start += 1
    while end > start and _is_punct(word[end - 1]):
        end -= 1
    return word[start:end]


def tokenize_target(raw: str) -> list[str]:
    """Split target-language text into lowercased word tokens.

    Leading and trailing punctuation is removed from every token; internal
    hyphens and apostrophes survive. Tokens that were pure punctuation are
    dropped, so the result may be empty.

    >>> tokenize_target("Computer-Science.")
    ['computer-science']
    >>> tokenize_target("subject of study")
    ['subject', 'of', 'study']
    """
    tokens = []
    for piece in _fold(raw).split():
        piece = _strip_punct(piece)
        if piece:
            tokens.append(piece)
    return tokens
