"""Target-language n-gram store with superset retrieval.

Each n-gram (order 2 to 5) is kept with its corpus frequency. The core
query takes a bag of words and returns every n-gram whose own word set
contains the whole bag, plus the summed frequency of those n-grams. It is
answered by intersecting per-token posting lists, shortest first.

Storage is columnar (numpy) so that a few million entries fit comfortably
in memory:

* ``tokens``   int32 ``(N, 5)`` vocabulary ids, right-padded with -1
* ``freqs``    int64 ``(N,)``
* ``offsets``  int64 ``(V + 1,)`` CSR offsets into ``postings``
* ``postings`` int32, entry ids per token, strictly ascending per token

Binary file layout (all integers little-endian)::

    magic      8 bytes   b"PTNGIDX\\x00"
    version    uint32    FORMAT_VERSION
    hdr_len    uint32
    header     hdr_len bytes of JSON: entries, vocab, vocab_bytes, postings
    vocab      vocab_bytes bytes, UTF-8 tokens joined by "\\n"
    tokens     entries * 5 int32
    freqs      entries int64
    offsets    (vocab + 1) int64
    postings   postings int32
    crc32      uint32 over everything after the version field
"""

from __future__ import annotations

import json
import logging
import struct
import zlib
from array import array
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Sequence

import numpy as np

from ._io import Source, open_binary
from .errors import EmptyQuery, FormatError, UnknownId, VersionMismatch
from .textnorm import tokenize_target

logger = logging.getLogger(__name__)

MIN_ORDER = 2
MAX_ORDER = 5
MAGIC = b"PTNGIDX\x00"
FORMAT_VERSION = 1
_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class NgramEntry:
    id: int
    words: tuple[str, ...]
    frequency: int

    @property
    def order(self) -> int:
        return len(self.words)

    @property
    def word_set(self) -> frozenset[str]:
        return frozenset(self.words)

    @property
    def text(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class SupersetResult:
    matches: tuple[int, ...]
    total_frequency: int


_EMPTY_RESULT = SupersetResult((), 0)


class NgramIndex:
    """Immutable n-gram index. Build with :func:`load_ngrams` or :meth:`from_entries`."""

    def __init__(
        self,
        vocab: Sequence[str],
        tokens: np.ndarray,
        freqs: np.ndarray,
        offsets: np.ndarray | None = None,
        postings: np.ndarray | None = None,
    ) -> None:
        self._vocab = list(vocab)
        self.malformed = 0
        self._token_ids = {w: i for i, w in enumerate(self._vocab)}
        self._tokens = np.ascontiguousarray(tokens, dtype=np.int32).reshape(-1, MAX_ORDER)
        self._freqs = np.ascontiguousarray(freqs, dtype=np.int64)
        if len(self._freqs) != len(self._tokens):
            raise ValueError("tokens and freqs disagree on entry count")
        self._orders = (self._tokens >= 0).sum(axis=1).astype(np.int8)
        if offsets is None or postings is None:
            offsets, postings = _build_postings(self._tokens, len(self._vocab))
        self._offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self._postings = np.ascontiguousarray(postings, dtype=np.int32)
        for arr in (self._tokens, self._freqs, self._offsets, self._postings):
            arr.flags.writeable = False

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[Sequence[str], int]]) -> "NgramIndex":
        """Build from ``(words, frequency)`` pairs of already-tokenized words."""
        builder = _Builder()
        for words, freq in entries:
            builder.add(words, freq)
        return builder.build()

    def __len__(self) -> int:
        return len(self._freqs)

    @property
    def vocabulary_size(self) -> int:
        return len(self._vocab)

    def entry(self, entry_id: int) -> NgramEntry:
        if not 0 <= entry_id < len(self._freqs):
            raise UnknownId(f"no n-gram with id {entry_id}")
        row = self._tokens[entry_id]
        words = tuple(self._vocab[t] for t in row[: self._orders[entry_id]])
        return NgramEntry(int(entry_id), words, int(self._freqs[entry_id]))

    def __iter__(self) -> Iterator[NgramEntry]:
        return (self.entry(i) for i in range(len(self)))

    def frequency(self, entry_id: int) -> int:
        return int(self._freqs[entry_id])

    def order(self, entry_id: int) -> int:
        return int(self._orders[entry_id])

    def frequencies_of(self, ids: Sequence[int] | np.ndarray) -> np.ndarray:
        return self._freqs[np.asarray(ids, dtype=np.int64)]

    def orders_of(self, ids: Sequence[int] | np.ndarray) -> np.ndarray:
        return self._orders[np.asarray(ids, dtype=np.int64)].astype(np.int64)

    def postings(self, token: str) -> np.ndarray:
        tid = self._token_ids.get(token)
        if tid is None:
            return self._postings[:0]
        return self._postings[self._offsets[tid] : self._offsets[tid + 1]]

    def superset_query(self, query: Iterable[str]) -> SupersetResult:
        """Every entry whose word set contains all of ``query``.

        Raises:
            EmptyQuery: ``query`` has no words.
        """
        return self._query(query, None)

    def session(self) -> "QuerySession":
        """A short-lived query helper that reuses intersections between related queries."""
        return QuerySession(self)

    def _query(self, query: Iterable[str], memo: dict | None) -> SupersetResult:
        words = set(query)
        if not words:
            raise EmptyQuery("superset query needs at least one word")
        if len(words) > MAX_ORDER:
            return _EMPTY_RESULT
        tids = []
        for word in words:
            tid = self._token_ids.get(word)
            if tid is None:
                return _EMPTY_RESULT
            tids.append(tid)
        offsets = self._offsets
        tids.sort(key=lambda t: (offsets[t + 1] - offsets[t], t))
        acc = self._postings[offsets[tids[0]] : offsets[tids[0] + 1]]
        for i in range(1, len(tids)):
            if not len(acc):
                break
            key = tuple(tids[: i + 1])
            hit = memo.get(key) if memo is not None else None
            if hit is None:
                t = tids[i]
                hit = _intersect(acc, self._postings[offsets[t] : offsets[t + 1]])
                if memo is not None:
                    memo[key] = hit
            acc = hit
        if not len(acc):
            return _EMPTY_RESULT
        total = int(self._freqs[acc].sum(dtype=np.int64))
        return SupersetResult(tuple(acc.tolist()), total)

    def save(self, sink: BinaryIO) -> None:
        save_index(self, sink)


class QuerySession:
    """Answers superset queries like the index, memoizing shared intersections.

    Not thread-safe; create one per thread or per translation.
    """

    def __init__(self, index: NgramIndex) -> None:
        self.index = index
        self._memo: dict[tuple[int, ...], np.ndarray] = {}

    def superset_query(self, query: Iterable[str]) -> SupersetResult:
        return self.index._query(query, self._memo)


def _intersect(small: np.ndarray, large: np.ndarray) -> np.ndarray:
    # Binary-search each element of the shorter list in the longer one.
    pos = np.searchsorted(large, small)
    inside = pos < len(large)
    cand = small[inside]
    return cand[large[pos[inside]] == cand]


def _build_postings(tokens: np.ndarray, vocab_size: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(tokens)
    srt = np.sort(tokens, axis=1)
    keep = srt >= 0
    keep[:, 1:] &= srt[:, 1:] != srt[:, :-1]
    ids = np.broadcast_to(np.arange(n, dtype=np.int32)[:, None], srt.shape)[keep]
    toks = srt[keep]
    # Row-major flattening lists ids ascending; a stable sort by token keeps that.
    perm = np.argsort(toks, kind="stable")
    postings = ids[perm]
    offsets = np.zeros(vocab_size + 1, dtype=np.int64)
    np.cumsum(np.bincount(toks, minlength=vocab_size), out=offsets[1:])
    return offsets, postings


class _Builder:
    def __init__(self) -> None:
        self.vocab: list[str] = []
        self.token_ids: dict[str, int] = {}
        self.rows = array("i")
        self.freqs = array("q")
        self.malformed = 0
        # raw field bytes -> token id, or -1 when the field is not a single token
        self._field_cache: dict[bytes, int] = {}

    def _intern(self, token: str) -> int:
        tid = self.token_ids.get(token)
        if tid is None:
            tid = self.token_ids[token] = len(self.vocab)
            self.vocab.append(token)
        return tid

    def add(self, words: Sequence[str], freq: int) -> None:
        if not MIN_ORDER <= len(words) <= MAX_ORDER:
            raise ValueError(f"n-gram order must be in [{MIN_ORDER}, {MAX_ORDER}]: {words!r}")
        if not 1 <= freq <= _INT64_MAX:
            raise ValueError(f"frequency out of range: {freq}")
        for w in words:
            if tokenize_target(w) != [w]:
                raise ValueError(f"not a normalized token: {w!r}")
        self.rows.extend([self._intern(w) for w in words])
        self.rows.extend([-1] * (MAX_ORDER - len(words)))
        self.freqs.append(freq)

    def _field_id(self, field: bytes) -> int:
        tid = self._field_cache.get(field)
        if tid is None:
            try:
                toks = tokenize_target(field.decode("utf-8"))
            except UnicodeDecodeError:
                toks = []
            tid = self._intern(toks[0]) if len(toks) == 1 else -1
            self._field_cache[field] = tid
        return tid

    def feed(self, source: Source) -> None:
        with open_binary(source) as fh:
            data = fh.read()
        if data.startswith(b"\xef\xbb\xbf"):
            data = data[3:]
        rows, freqs = self.rows, self.freqs
        cached = self._field_cache.get
        field_id = self._field_id
        pad = [[-1] * k for k in range(MAX_ORDER + 1)]
        malformed = 0
        for line in data.replace(b"\r\n", b"\n").split(b"\n"):
            parts = line.split(b"\t")
            n = len(parts) - 1
            if not MIN_ORDER <= n <= MAX_ORDER:
                if line.strip() and not line.startswith(b"#"):
                    malformed += 1
                continue
            if line.startswith(b"#"):
                continue
            try:
                freq = int(parts[0])
            except ValueError:
                malformed += 1
                continue
            if not 1 <= freq <= _INT64_MAX:
                malformed += 1
                continue
            del parts[0]
            ids = [cached(f) for f in parts]
            if None in ids:
                ids = [field_id(f) for f in parts]
            if -1 in ids:
                malformed += 1
                continue
            rows.extend(ids)
            rows.extend(pad[MAX_ORDER - n])
            freqs.append(freq)
        self.malformed += malformed

    def build(self) -> NgramIndex:
        if not len(self.freqs):
            raise FormatError("n-gram data contains no valid entries")
        if self.malformed:
            logger.warning("skipped %d malformed n-gram lines", self.malformed)
        tokens = np.frombuffer(self.rows, dtype=np.int32).reshape(-1, MAX_ORDER)
        freqs = np.frombuffer(self.freqs, dtype=np.int64)
        tokens, freqs = _merge_duplicates(tokens, freqs)
        index = NgramIndex(self.vocab, tokens, freqs)
        index.malformed = self.malformed
        return index


def _merge_duplicates(tokens: np.ndarray, freqs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse identical word sequences, summing frequencies.

    Surviving entries keep the position of their first occurrence, so ids
    follow input order.
    """
    n = len(tokens)
    # lexsort is stable: within a group of equal rows the earliest index comes first.
    perm = np.lexsort(tokens.T[::-1])
    srt = tokens[perm]
    starts = np.empty(n, dtype=bool)
    starts[0] = True
    np.any(srt[1:] != srt[:-1], axis=1, out=starts[1:])
    n_groups = int(starts.sum())
    if n_groups == n:
        return tokens, freqs
    group = np.cumsum(starts) - 1
    first = perm[starts]
    sums = np.zeros(n_groups, dtype=np.int64)
    np.add.at(sums, group, freqs[perm])
    if int(freqs.max()) * n > _INT64_MAX:
        exact = [0] * n_groups
        for g, f in zip(group.tolist(), freqs[perm].tolist()):
            exact[g] += f
        if max(exact) > _INT64_MAX:
            raise FormatError("merged n-gram frequency exceeds 64-bit range")
    order = np.argsort(first, kind="stable")
    return tokens[first[order]], sums[order]


def load_ngrams(sources: Iterable[Source]) -> NgramIndex:
    """Parse one or more n-gram files into an index.

    Each line is ``frequency<TAB>word_1<TAB>...<TAB>word_n`` with 2 <= n <= 5.
    Comment lines start with ``#``. Malformed lines are skipped and counted;
    identical word sequences (within or across files) have frequencies summed.
    Entry ids follow file order, then line order.

    Raises:
        FormatError: no valid line in any source.
    """
    builder = _Builder()
    for source in sources:
        builder.feed(source)
    return builder.build()


def save_index(index: NgramIndex, sink: BinaryIO) -> None:
    """Serialize ``index`` to ``sink``; output is byte-identical for equal indexes."""
    if not len(index):
        raise FormatError("refusing to save an empty index")
    vocab_bytes = "\n".join(index._vocab).encode("utf-8")
    header = json.dumps(
        {
            "entries": len(index),
            "vocab": len(index._vocab),
            "vocab_bytes": len(vocab_bytes),
            "postings": len(index._postings),
        },
        sort_keys=True,
    ).encode("ascii")
    body = [
        struct.pack("<I", len(header)),
        header,
        vocab_bytes,
        index._tokens.astype("<i4").tobytes(),
        index._freqs.astype("<i8").tobytes(),
        index._offsets.astype("<i8").tobytes(),
        index._postings.astype("<i4").tobytes(),
    ]
    crc = 0
    for chunk in body:
        crc = zlib.crc32(chunk, crc)
    sink.write(MAGIC)
    sink.write(struct.pack("<I", FORMAT_VERSION))
    for chunk in body:
        sink.write(chunk)
    sink.write(struct.pack("<I", crc))


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError("index file is truncated")
    return data


def load_index(source: Source) -> NgramIndex:
    """Read an index written by :func:`save_index`.

    Raises:
        VersionMismatch: wrong magic bytes or format version.
        FormatError: truncated or corrupted payload.
    """
    with open_binary(source) as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise VersionMismatch("not a phrasetrans n-gram index")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"index format version {version}, expected {FORMAT_VERSION}")
        raw_len = _read_exact(fh, 4)
        (hdr_len,) = struct.unpack("<I", raw_len)
        raw_header = _read_exact(fh, hdr_len)
        try:
            header = json.loads(raw_header)
            n, v = int(header["entries"]), int(header["vocab"])
            nb, p = int(header["vocab_bytes"]), int(header["postings"])
        except (ValueError, KeyError, TypeError) as exc:
            raise FormatError(f"bad index header: {exc}") from None
        chunks = [
            raw_len,
            raw_header,
            _read_exact(fh, nb),
            _read_exact(fh, n * MAX_ORDER * 4),
            _read_exact(fh, n * 8),
            _read_exact(fh, (v + 1) * 8),
            _read_exact(fh, p * 4),
        ]
        (crc,) = struct.unpack("<I", _read_exact(fh, 4))
    actual = 0
    for chunk in chunks:
        actual = zlib.crc32(chunk, actual)
    if actual != crc:
        raise FormatError("index checksum mismatch")
    vocab = chunks[2].decode("utf-8").split("\n") if v else []
    if len(vocab) != v:
        raise FormatError("vocabulary size does not match header")
    return NgramIndex(
        vocab,
        np.frombuffer(chunks[3], dtype="<i4").reshape(n, MAX_ORDER),
        np.frombuffer(chunks[4], dtype="<i8"),
        np.frombuffer(chunks[5], dtype="<i8"),
        np.frombuffer(chunks[6], dtype="<i4"),
    )


def superset_query(index: NgramIndex, query: Iterable[str]) -> SupersetResult:
    return index.superset_query(query)


def entry(index: NgramIndex, entry_id: int) -> NgramEntry:
    return index.entry(entry_id)
