import itertools

import numpy as np
import pytest

from symlab.words import (
    LATIN,
    LATIN2,
    Alphabet,
    Domain,
    DomainError,
    EncoderSpec,
    EncodingError,
    EnumerationTooLarge,
    InfeasibleCodebook,
    encode,
    encode_many,
    enumerate_words,
    fresh_distributed_codebook,
    localist_encoder,
)


def test_enumerate_tiny():
    assert enumerate_words(Alphabet.from_string("AB"), 2) == ["AA", "AB", "BA", "BB"]


def test_enumerate_latin_pairs():
    words = enumerate_words(LATIN, 2)
    assert len(words) == 26**2
    assert words[0] == "AA" and words[-1] == "ZZ"
    assert words == sorted(words)


def test_enumerate_singleton_alphabet():
    assert enumerate_words(Alphabet.from_string("A"), 3) == ["AAA"]


def test_enumerate_too_large():
    with pytest.raises(EnumerationTooLarge):
        enumerate_words(LATIN, 6)


def test_alphabet_rejects_duplicates():
    with pytest.raises(ValueError):
        Alphabet.from_string("ABA")


def test_domain_index_round_trip(all_words):
    for i, w in enumerate(all_words):
        assert LATIN2.index(w) == i
        assert LATIN2.word_at(i) == w


@pytest.mark.parametrize("bad", ["A", "ABC", "A1", "ab"])
def test_domain_validate(bad):
    with pytest.raises(DomainError):
        LATIN2.validate(bad)


def test_localist_codes():
    spec = localist_encoder()
    assert set(np.flatnonzero(encode("AB", spec))) == {0, 27}
    assert set(np.flatnonzero(encode("AA", spec))) == {0, 26}
    assert encode("AB", spec).shape == (52,)


def test_toy_distributed_encoding():
    spec = EncoderSpec("distributed", Alphabet.from_string("AB"), 2, [[0, 1], [1, 0]])
    assert encode("AB", spec).tolist() == [0, 1, 1, 0]


def test_encode_unknown_letter():
    spec = EncoderSpec("distributed", Alphabet.from_string("AB"), 2, [[0, 1], [1, 0]])
    with pytest.raises(EncodingError):
        encode("AC", spec)


@pytest.mark.parametrize("book", [[[0, 0], [1, 0]], [[1, 0], [1, 0]]])
def test_distributed_codebook_must_be_distinct_and_nonzero(book):
    with pytest.raises(ValueError):
        EncoderSpec("distributed", Alphabet.from_string("AB"), 2, book)


def test_codebook_determinism_and_variation():
    a = fresh_distributed_codebook(LATIN, 26, 7)
    assert a == fresh_distributed_codebook(LATIN, 26, 7)
    for s in range(10):
        assert fresh_distributed_codebook(LATIN, 26, s) != fresh_distributed_codebook(LATIN, 26, s + 100)


def test_codebook_infeasible():
    with pytest.raises(InfeasibleCodebook):
        fresh_distributed_codebook(Alphabet.from_string("ABCD"), 2, 0)


def test_codebook_tight_fit():
    spec = fresh_distributed_codebook(Alphabet.from_string("ABC"), 2, 0)
    assert {tuple(r) for r in spec.codebook} == {(0, 1), (1, 0), (1, 1)}


@pytest.mark.parametrize("kind", ["localist", "distributed"])
def test_encoding_injective_on_all_pairs(kind, all_words):
    spec = localist_encoder() if kind == "localist" else fresh_distributed_codebook(LATIN, 26, 3)
    X = encode_many(all_words, spec)
    assert len({row.tobytes() for row in X}) == len(all_words)
    if kind == "localist":
        assert (X.sum(axis=1) == 2).all()


def test_codebook_csv_round_trip():
    spec = fresh_distributed_codebook(LATIN, 26, 11)
    text = spec.to_csv()
    assert text.splitlines()[0] == "letter,bits"
    assert EncoderSpec.from_csv(text) == spec


def test_bits_are_floats():
    x = encode("QZ", fresh_distributed_codebook(LATIN, 26, 1))
    assert x.dtype == np.float64
    assert set(np.unique(x)) <= {0.0, 1.0}


def test_three_letter_domain():
    d = Domain(Alphabet.from_string("ABC"), 3)
    assert d.words() == ["".join(t) for t in itertools.product("ABC", repeat=3)]
