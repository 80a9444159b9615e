"""Phrase translation from a bilingual dictionary and target n-grams.

Stages, in order:

1. enumerate every segmentation of the phrase into words;
2. drop segmentations containing a word the dictionary cannot translate;
3. expand each remaining segmentation into ad hoc translations, one per
   combination of word translations;
4. score each ad hoc translation's bag of words by the total frequency of
   n-grams containing the whole bag, keeping the first highest scorer;
5. turn the n-grams that supported the winner into ranked candidates.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import CandidateExplosion, NoMatches
from .lexicon import Lexicon, Translation
from .ngram_index import MAX_ORDER, NgramIndex, QuerySession
from .textnorm import DEFAULT_MAX_SYLLABLES, SourcePhrase, normalize_source

DEFAULT_TOP_K = 10
DEFAULT_PRODUCT_CAP = 10_000
SIZE_PENALTY = 100
# Every possible size difference (1 .. MAX_ORDER - 1) divides this, which makes
# frequency * _SORT_SCALE / difference an exact integer sort key.
_SORT_SCALE = math.lcm(*range(1, MAX_ORDER))


@dataclass(frozen=True)
class Segmentation:
    """A partition of a phrase's syllables into consecutive words.

    Bit ``i`` of ``boundary_mask`` is set when there is a word break between
    syllable ``i`` and syllable ``i + 1`` (zero-based).
    """

    words: tuple[str, ...]
    boundary_mask: int

    def __str__(self) -> str:
        return "<" + "; ".join(self.words) + ">"


@dataclass(frozen=True)
class AdHocTranslation:
    tokens: tuple[str, ...]
    segmentation: Segmentation
    choices: tuple[int, ...]
    score: int = 0
    matches: tuple[int, ...] = ()

    @property
    def word_set(self) -> frozenset[str]:
        return frozenset(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


class Tier(enum.IntEnum):
    # Integer value doubles as the primary sort key.
    EXACT_SIZE = 0
    SIZE_MISMATCH = 1

    @property
    def label(self) -> str:
        return "ExactSize" if self is Tier.EXACT_SIZE else "SizeMismatch"


@dataclass(frozen=True)
class RankedCandidate:
    words: tuple[str, ...]
    frequency: int
    tier: Tier
    rank_score: Fraction
    source_entry_id: int

    @property
    def text(self) -> str:
        return " ".join(self.words)


class Status(enum.Enum):
    OK = "ok"
    NO_TRANSLATION = "no_translation"


@dataclass
class Diagnostics:
    syllables: int = 0
    segmentations_enumerated: int = 0
    segmentations_kept: int = 0
    adhoc_generated: int = 0
    adhoc_collapsed: int = 0
    adhoc_scored: int = 0
    matched_ids: int = 0
    candidates_total: int = 0


@dataclass
class TranslationResult:
    phrase: SourcePhrase
    best_adhoc: AdHocTranslation | None
    candidates: list[RankedCandidate]
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @property
    def status(self) -> Status:
        return Status.OK if self.candidates else Status.NO_TRANSLATION


@dataclass(frozen=True)
class TranslateOptions:
    top_k: int = DEFAULT_TOP_K
    max_syllables: int = DEFAULT_MAX_SYLLABLES
    product_cap: int = DEFAULT_PRODUCT_CAP

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        if self.max_syllables < 1:
            raise ValueError("max_syllables must be at least 1")
        if self.product_cap < 1:
            raise ValueError("product_cap must be at least 1")


def enumerate_segmentations(phrase: SourcePhrase | Sequence[str]) -> list[Segmentation]:
    """All ``2 ** (n - 1)`` segmentations, in ascending ``boundary_mask`` order."""
    syllables = phrase.syllables if isinstance(phrase, SourcePhrase) else tuple(phrase)
    n = len(syllables)
    if n == 0:
        return []
    segs = []
    for mask in range(1 << (n - 1)):
        words, start = [], 0
        for i in range(n - 1):
            if mask >> i & 1:
                words.append(" ".join(syllables[start : i + 1]))
                start = i + 1
        words.append(" ".join(syllables[start:]))
        segs.append(Segmentation(tuple(words), mask))
    return segs


def filter_segmentations(segs: Sequence[Segmentation], lex: Lexicon) -> list[Segmentation]:
    """Keep segmentations whose every word has a dictionary translation."""
    return [s for s in segs if all(w in lex for w in s.words)]


def _distinct(words: Sequence[str]) -> list[str]:
    return list(dict.fromkeys(words))


def product_size(seg: Segmentation, lex: Lexicon) -> int:
    """Number of ad hoc translations ``seg`` expands to before deduplication."""
    return math.prod(len(lex.lookup(w)) for w in _distinct(seg.words))


def iter_adhoc_translations(
    segs: Sequence[Segmentation], lex: Lexicon, product_cap: int = DEFAULT_PRODUCT_CAP
) -> Iterator[AdHocTranslation]:
    """Yield every ad hoc translation, duplicates included.

    A word that occurs more than once in a segmentation gets the same
    translation at every occurrence, so the product runs over distinct
    words. Order is segmentation order, then the cartesian product over
    distinct words (first-appearance order) with the last one varying
    fastest, each word's translations in dictionary order. ``choices`` holds
    the chosen translation index for every word position.

    Raises:
        CandidateExplosion: one segmentation would yield more than
            ``product_cap`` translations. Checked before anything is yielded
            for that segmentation.
    """
    for seg in segs:
        distinct = _distinct(seg.words)
        options = {w: lex.lookup(w) for w in distinct}
        size = math.prod(len(o) for o in options.values())
        if size > product_cap:
            raise CandidateExplosion(size, product_cap)
        for picked in itertools.product(*(range(len(options[w])) for w in distinct)):
            choice = dict(zip(distinct, picked))
            tokens = tuple(tok for w in seg.words for tok in options[w][choice[w]])
            yield AdHocTranslation(tokens, seg, tuple(choice[w] for w in seg.words))


def generate_adhoc_translations(
    segs: Sequence[Segmentation], lex: Lexicon, product_cap: int = DEFAULT_PRODUCT_CAP
) -> list[AdHocTranslation]:
    """Ad hoc translations deduplicated by word set, first occurrence kept."""
    return _dedup(iter_adhoc_translations(segs, lex, product_cap))[0]


def _dedup(items: Iterator[AdHocTranslation]) -> tuple[list[AdHocTranslation], int]:
    seen: set[frozenset[str]] = set()
    kept, collapsed = [], 0
    for t in items:
        bag = t.word_set
        if bag in seen:
            collapsed += 1
            continue
        seen.add(bag)
        kept.append(t)
    return kept, collapsed


def score_bag(
    t: AdHocTranslation, index: NgramIndex | QuerySession
) -> AdHocTranslation:
    """Return ``t`` with score and matches filled from a superset query."""
    bag = t.word_set
    if len(bag) > MAX_ORDER:
        return replace(t, score=0, matches=())
    result = index.superset_query(bag)
    return replace(t, score=result.total_frequency, matches=result.matches)


def select_best_adhoc(translations: Sequence[AdHocTranslation]) -> AdHocTranslation | None:
    """First translation with the strictly greatest score.

    None when there is nothing to choose from or no translation has any
    n-gram support (best score 0).
    """
    if not translations:
        return None
    best = translations[0]
    for t in translations:
        if t.score > best.score:
            best = t
    return best if best.score > 0 else None


def rank_score(frequency: int, cand_size: int, bag_size: int) -> tuple[Tier, Fraction]:
    if cand_size == bag_size:
        return Tier.EXACT_SIZE, Fraction(frequency)
    return Tier.SIZE_MISMATCH, Fraction(frequency, abs(cand_size - bag_size) * SIZE_PENALTY)


def rank_candidates(best: AdHocTranslation, index: NgramIndex) -> list[RankedCandidate]:
    """Rank the n-grams that matched ``best``.

    Candidates whose order equals the bag size come first, by frequency.
    The rest are scored by frequency over 100 times the size difference.
    Ties fall back to the candidate text.

    Raises:
        NoMatches: ``best`` has no matched n-grams.
    """
    if not best.matches:
        raise NoMatches("best ad hoc translation has no matching n-grams")
    bag_size = len(best.word_set)
    keyed = []
    for entry_id in best.matches:
        entry = index.entry(entry_id)
        tier, score = rank_score(entry.frequency, entry.order, bag_size)
        diff = abs(entry.order - bag_size) or 1
        key = (tier, -(entry.frequency * _SORT_SCALE // diff), entry.text)
        keyed.append((key, RankedCandidate(entry.words, entry.frequency, tier, score, entry_id)))
    keyed.sort(key=lambda kc: kc[0])
    return [c for _, c in keyed]


def top_candidates(best: AdHocTranslation, index: NgramIndex, k: int) -> list[RankedCandidate]:
    """Same as ``rank_candidates(best, index)[:k]`` without materializing every match."""
    if not best.matches:
        raise NoMatches("best ad hoc translation has no matching n-grams")
    if len(best.matches) <= k:
        return rank_candidates(best, index)
    ids = np.asarray(best.matches, dtype=np.int64)
    freqs = index.frequencies_of(ids)
    if int(freqs.max()) > np.iinfo(np.int64).max // _SORT_SCALE:
        return rank_candidates(best, index)[:k]
    diff = np.abs(index.orders_of(ids) - len(best.word_set))
    tier = (diff != 0).astype(np.int64)
    score = freqs * _SORT_SCALE // np.maximum(diff, 1)
    order = np.lexsort((-score, tier))
    kth = order[k - 1]
    # Everything tied with the k-th key on (tier, score) goes to the exact sort, text decides.
    keep = (tier < tier[kth]) | ((tier == tier[kth]) & (score >= score[kth]))
    subset = replace(best, matches=tuple(ids[keep].tolist()))
    return rank_candidates(subset, index)[:k]


def translate(
    phrase_raw: str,
    lex: Lexicon,
    index: NgramIndex,
    options: TranslateOptions | None = None,
) -> TranslationResult:
    """Run the whole pipeline on one raw phrase.

    A phrase without n-gram support yields a result with no candidates
    (``Status.NO_TRANSLATION``) rather than an exception.

    Raises:
        EmptyInput, PhraseTooLong: from phrase normalization.
        CandidateExplosion: a segmentation exceeds ``options.product_cap``.
    """
    options = options or TranslateOptions()
    phrase = normalize_source(phrase_raw, options.max_syllables)
    diag = Diagnostics(syllables=len(phrase))

    segs = enumerate_segmentations(phrase)
    diag.segmentations_enumerated = len(segs)
    kept = filter_segmentations(segs, lex)
    diag.segmentations_kept = len(kept)

    adhoc, collapsed = _dedup(iter_adhoc_translations(kept, lex, options.product_cap))
    diag.adhoc_generated = len(adhoc) + collapsed
    diag.adhoc_collapsed = collapsed

    session = index.session()
    scored = [score_bag(t, session) for t in adhoc]
    diag.adhoc_scored = len(scored)
    best = select_best_adhoc(scored)
    if best is None:
        return TranslationResult(phrase, None, [], diag)

    diag.matched_ids = diag.candidates_total = len(best.matches)
    ranked = top_candidates(best, index, options.top_k)
    return TranslationResult(phrase, best, ranked, diag)
