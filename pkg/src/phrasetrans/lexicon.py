"""Bilingual dictionary loading and lookup.

The on-disk format is UTF-8 text with one ``headword<TAB>translation`` pair
per line. A headword with several senses appears on several lines. Lines
starting with ``#`` are comments and blank lines are ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ._io import Source, iter_text_lines
from .errors import FormatError
from .textnorm import SourcePhrase, normalize_word, tokenize_target

logger = logging.getLogger(__name__)

Translation = tuple[str, ...]


@dataclass(frozen=True)
class DictEntry:
    headword: str
    translation: Translation

    def __post_init__(self) -> None:
        if not self.headword or not self.translation:
            raise ValueError("headword and translation must be non-empty")


@dataclass
class Lexicon:
    """Immutable-after-load multimap from source words to translations."""

    entries: Mapping[str, tuple[Translation, ...]]
    malformed: int = 0
    malformed_lines: list[int] = field(default_factory=list, repr=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "Lexicon":
        """Build a lexicon from raw ``(headword, translation)`` strings."""
        builder = _Builder()
        for headword, translation in pairs:
            if not builder.add(headword, translation):
                raise ValueError(f"invalid pair {headword!r} -> {translation!r}")
        return builder.build()

    def lookup(self, word: str) -> list[Translation]:
        """All translations of ``word`` in file order; empty when unknown."""
        return list(self.entries.get(word, ()))

    def contains_phrase(self, phrase: SourcePhrase) -> bool:
        return phrase.text in self.entries

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def iter_entries(self) -> Iterable[DictEntry]:
        for headword, translations in self.entries.items():
            for translation in translations:
                yield DictEntry(headword, translation)


class _Builder:
    def __init__(self) -> None:
        self._entries: dict[str, list[Translation]] = {}
        self._seen: set[tuple[str, Translation]] = set()

    def add(self, headword: str, translation: str) -> bool:
        head = normalize_word(headword)
        tokens = tuple(tokenize_target(translation))
        if not head or not tokens:
            return False
        if (head, tokens) not in self._seen:
            self._seen.add((head, tokens))
            self._entries.setdefault(head, []).append(tokens)
        return True

    def build(self, malformed_lines: list[int] | None = None) -> Lexicon:
        malformed_lines = malformed_lines or []
        return Lexicon(
            {k: tuple(v) for k, v in self._entries.items()},
            malformed=len(malformed_lines),
            malformed_lines=malformed_lines,
        )


def load_dictionary(source: Source) -> Lexicon:
    """Parse a TAB-separated dictionary file or binary stream.

    Malformed lines (not exactly one TAB, empty headword or translation,
    bad UTF-8) are counted in ``Lexicon.malformed`` and skipped.

    Raises:
        FormatError: no valid entry was found.
        OSError: the source could not be read.
    """
    builder = _Builder()
    bad: list[int] = []
    valid = 0
    for lineno, text in iter_text_lines(source):
        if text is None:
            bad.append(lineno)
            continue
        if not text.strip() or text.startswith("#"):
            continue
        parts = text.split("\t")
        if len(parts) != 2 or not builder.add(parts[0], parts[1]):
            bad.append(lineno)
            continue
        valid += 1
    if not valid:
        raise FormatError("dictionary contains no valid entries")
    if bad:
        logger.warning("skipped %d malformed dictionary lines", len(bad))
    return builder.build(bad)


def lookup(lex: Lexicon, word: str) -> list[Translation]:
    return lex.lookup(word)


def contains_phrase(lex: Lexicon, phrase: SourcePhrase) -> bool:
    return lex.contains_phrase(phrase)
