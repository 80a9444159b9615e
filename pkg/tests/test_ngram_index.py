import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_superset, dedupe_merge
from phrasetrans.errors import EmptyQuery, FormatError, UnknownId, VersionMismatch
from phrasetrans.ngram_index import NgramIndex, load_index, load_ngrams, save_index


def _load(text: str) -> NgramIndex:
    return load_ngrams([io.BytesIO(text.encode("utf-8"))])


def _random_entries(rng: random.Random, n: int, vocab: int):
    words = [f"w{i}" for i in range(vocab)]
    return [
        (rng.choices(words, k=rng.randint(2, 5)), rng.randint(1, 10_000)) for _ in range(n)
    ]


def test_khoa_entry(khoa_index):
    hit = khoa_index.superset_query({"department", "science"})
    assert hit.total_frequency == 112
    (eid,) = hit.matches
    e = khoa_index.entry(eid)
    assert (e.words, e.order, e.frequency) == (("science", "department"), 2, 112)
    assert e.id == eid == 0


def test_unseen_word(khoa_index):
    res = khoa_index.superset_query({"zzz-unseen"})
    assert res.matches == () and res.total_frequency == 0


def test_empty_query(khoa_index):
    with pytest.raises(EmptyQuery):
        khoa_index.superset_query(set())


def test_unknown_id(khoa_index):
    with pytest.raises(UnknownId):
        khoa_index.entry(len(khoa_index))
    with pytest.raises(UnknownId):
        khoa_index.entry(-1)


def test_merge_and_malformed():
    idx = _load("5\ta\tb\n3\tonly\nx\ta\tb\n0\ta\tb\n7\ta\tb\n1\ta\tb\tc\td\te\tf\n2\tc\td\n")
    assert len(idx) == 2
    assert idx.malformed == 4
    assert idx.entry(0).words == ("a", "b") and idx.entry(0).frequency == 12
    assert idx.entry(1).words == ("c", "d")


def test_merge_across_files_keeps_first_order():
    a = io.BytesIO(b"1\tx\ty\n2\tp\tq\n")
    b = io.BytesIO(b"10\tp\tq\n20\tm\tn\n30\tx\ty\n")
    idx = load_ngrams([a, b])
    assert [(e.words, e.frequency) for e in idx] == [
        (("x", "y"), 31),
        (("p", "q"), 12),
        (("m", "n"), 20),
    ]


def test_fields_normalized():
    idx = _load("4\tScience\tDepartment.\r\n")
    assert idx.entry(0).words == ("science", "department")


def test_repeated_word_set_semantics():
    idx = _load("9\tvery\tvery\tgood\n")
    e = idx.entry(0)
    assert e.order == 3 and e.word_set == {"very", "good"}
    assert idx.superset_query({"very"}).matches == (0,)
    assert idx.postings("very").tolist() == [0]


def test_no_valid_lines():
    with pytest.raises(FormatError):
        _load("# only comments\n3\tlonely\n")


def test_query_larger_than_five_is_empty(khoa_index):
    assert khoa_index.superset_query({"a", "b", "c", "d", "e", "f"}).matches == ()


def test_oracle_small_random():
    rng = random.Random(7)
    for _ in range(30):
        entries = _random_entries(rng, rng.randint(1, 200), rng.randint(3, 30))
        idx = NgramIndex.from_entries(entries)
        merged = dedupe_merge(entries)
        vocab = sorted({w for ws, _ in entries for w in ws}) + ["unseen"]
        for _ in range(20):
            q = set(rng.sample(vocab, rng.randint(1, min(6, len(vocab)))))
            ids, total = brute_superset(merged, q)
            res = idx.superset_query(q)
            assert set(res.matches) == ids
            assert res.total_frequency == total


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.lists(st.sampled_from("abcdefg"), min_size=2, max_size=5), st.integers(1, 50)),
        min_size=1,
        max_size=40,
    ),
    st.sets(st.sampled_from("abcdefgh"), min_size=1, max_size=4),
    st.sampled_from("abcdefgh"),
)
def test_monotone_and_conserving(entries, query, extra):
    idx = NgramIndex.from_entries(entries)
    base = idx.superset_query(query)
    more = idx.superset_query(query | {extra})
    assert set(more.matches) <= set(base.matches)
    assert base.total_frequency == sum(idx.entry(i).frequency for i in base.matches)
    assert list(base.matches) == sorted(base.matches)


def test_postings_invariant():
    rng = random.Random(3)
    idx = NgramIndex.from_entries(_random_entries(rng, 300, 25))
    for i in range(len(idx)):
        assert idx.entry(i).id == i
    for w in (f"w{k}" for k in range(25)):
        plist = idx.postings(w).tolist()
        assert plist == sorted(set(plist))
        assert plist == [i for i in range(len(idx)) if w in idx.entry(i).word_set]


def test_large_frequencies_do_not_overflow():
    big = 2**62
    idx = NgramIndex.from_entries([(["a", "b"], big), (["a", "c"], big - 1)])
    assert idx.superset_query({"a"}).total_frequency == 2**63 - 1


def test_save_load_round_trip(khoa_index):
    buf = io.BytesIO()
    save_index(khoa_index, buf)
    first = buf.getvalue()
    back = load_index(io.BytesIO(first))
    assert list(back) == list(khoa_index)
    vocab = sorted({w for e in khoa_index for w in e.words}) + ["nope"]
    rng = random.Random(11)
    for _ in range(100):
        q = set(rng.sample(vocab, rng.randint(1, 3)))
        assert back.superset_query(q) == khoa_index.superset_query(q)
    again = io.BytesIO()
    save_index(back, again)
    assert again.getvalue() == first


def test_save_file_path(tmp_path, khoa_index):
    path = tmp_path / "x.idx"
    with open(path, "wb") as fh:
        khoa_index.save(fh)
    assert len(load_index(path)) == len(khoa_index)


def test_empty_index_cannot_be_saved():
    import numpy as np

    empty = NgramIndex([], np.zeros((0, 5), dtype=np.int32), np.zeros(0, dtype=np.int64))
    with pytest.raises(FormatError):
        save_index(empty, io.BytesIO())


def test_bad_magic_and_version(khoa_index):
    buf = io.BytesIO()
    save_index(khoa_index, buf)
    data = bytearray(buf.getvalue())
    with pytest.raises(VersionMismatch):
        load_index(io.BytesIO(b"XXXXXXXX" + bytes(data[8:])))
    data[8] = 99
    with pytest.raises(VersionMismatch):
        load_index(io.BytesIO(bytes(data)))


def test_truncated_and_corrupted(khoa_index):
    buf = io.BytesIO()
    save_index(khoa_index, buf)
    data = buf.getvalue()
    with pytest.raises(FormatError):
        load_index(io.BytesIO(data[:-10]))
    flipped = bytearray(data)
    flipped[-20] ^= 0xFF
    with pytest.raises(FormatError):
        load_index(io.BytesIO(bytes(flipped)))
