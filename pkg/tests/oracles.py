"""Independent reference implementations used to check the fast paths."""

from __future__ import annotations

import math
from typing import Sequence


def brute_superset(entries: Sequence[tuple[Sequence[str], int]], query: set[str]) -> tuple[set[int], int]:
    """Linear scan: ids of entries whose word set contains ``query``, and their frequency sum."""
    ids = {i for i, (words, _) in enumerate(entries) if query <= set(words)}
    return ids, sum(entries[i][1] for i in ids)


def recursive_segmentations(syllables: Sequence[str]) -> list[tuple[str, ...]]:
    """Split off every possible first word, recurse on the rest."""
    if not syllables:
        return [()]
    out = []
    for cut in range(1, len(syllables) + 1):
        head = " ".join(syllables[:cut])
        for rest in recursive_segmentations(syllables[cut:]):
            out.append((head,) + rest)
    return out


def literal_argmax_select(scores: Sequence[int]) -> int:
    """Start from the first bag, replace it only on a strictly greater score.

    Returns the chosen position; an all-zero list still yields 0.
    """
    best = 0
    for i in range(len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


def adhoc_count(words: Sequence[str], senses: dict[str, int]) -> int:
    """Expected number of ad hoc translations for one segmentation before dedup."""
    return math.prod(senses[w] for w in dict.fromkeys(words))


def dedupe_merge(entries: Sequence[tuple[Sequence[str], int]]) -> list[tuple[tuple[str, ...], int]]:
    """Merge identical word sequences by summing frequency, first occurrence order."""
    merged: dict[tuple[str, ...], int] = {}
    for words, freq in entries:
        key = tuple(words)
        merged[key] = merged.get(key, 0) + freq
    return list(merged.items())
