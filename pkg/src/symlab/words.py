"""Alphabets, fixed-length words and binary letter encodings.

Words are plain strings whose characters are letters of an :class:`Alphabet`.
A :class:`Domain` pairs an alphabet with a word length and is the finite
universe of words that symmetries act on.
"""
from __future__ import annotations

import csv
import io
import itertools
import string
from dataclasses import dataclass, field

import numpy as np

MAX_ENUMERATION = 1_000_000


class DomainError(ValueError):
    """A word or dataset does not belong to the expected domain."""


class EnumerationTooLarge(DomainError):
    pass


class EncodingError(ValueError):
    pass


class InfeasibleCodebook(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if len(letters) < 1:
            raise ValueError("alphabet must contain at least one letter")
        if any(len(x) != 1 for x in letters):
            raise ValueError("letters must be single characters")
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate letters in alphabet {''.join(letters)!r}")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(letters)})

    @classmethod
    def from_string(cls, letters: str) -> "Alphabet":
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in self._index

    def __str__(self) -> str:
        return "".join(self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise DomainError(f"letter {letter!r} not in alphabet {self}") from None


LATIN = Alphabet.from_string(string.ascii_uppercase)


@dataclass(frozen=True)
class Domain:
    """The set of all words of a fixed length over an alphabet."""

    alphabet: Alphabet
    length: int = 2

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("word length must be positive")

    @property
    def size(self) -> int:
        return len(self.alphabet) ** self.length

    def validate(self, word: str) -> str:
        if not isinstance(word, str) or len(word) != self.length:
            raise DomainError(f"{word!r} is not a word of length {self.length}")
        for c in word:
            if c not in self.alphabet:
                raise DomainError(f"{word!r} uses letter {c!r} outside alphabet {self.alphabet}")
        return word

    def __contains__(self, word) -> bool:
        try:
            self.validate(word)
        except DomainError:
            return False
        return True

    def index(self, word: str) -> int:
        """Position of ``word`` in the lexicographic enumeration."""
        self.validate(word)
        n = len(self.alphabet)
        idx = 0
        for c in word:
            idx = idx * n + self.alphabet.index(c)
        return idx

    def word_at(self, index: int) -> str:
        n = len(self.alphabet)
        letters = []
        for _ in range(self.length):
            index, r = divmod(index, n)
            letters.append(self.alphabet.letters[r])
        return "".join(reversed(letters))

    def words(self) -> list[str]:
        return enumerate_words(self.alphabet, self.length)


LATIN2 = Domain(LATIN, 2)


def enumerate_words(alphabet: Alphabet, length: int) -> list[str]:
    """All ``len(alphabet) ** length`` words in lexicographic index order."""
    if length < 1:
        raise ValueError("word length must be positive")
    size = len(alphabet) ** length
    if size > MAX_ENUMERATION:
        raise EnumerationTooLarge(f"{size} words exceeds enumeration limit {MAX_ENUMERATION}")
    return ["".join(t) for t in itertools.product(alphabet.letters, repeat=length)]


@dataclass(frozen=True, eq=False)
class EncoderSpec:
    """Per-letter bit codes.

    ``codebook`` has one row per alphabet letter. Localist codes are rows of
    the identity matrix; distributed codes are arbitrary distinct non-zero
    rows.
    """

    kind: str
    alphabet: Alphabet
    code_length: int
    codebook: np.ndarray = field(repr=False)

    def __post_init__(self):
        book = np.asarray(self.codebook, dtype=np.uint8)
        book.setflags(write=False)
        object.__setattr__(self, "codebook", book)
        if self.kind not in ("localist", "distributed"):
            raise ValueError(f"unknown encoding kind {self.kind!r}")
        if book.shape != (len(self.alphabet), self.code_length):
            raise ValueError(
                f"codebook shape {book.shape} != ({len(self.alphabet)}, {self.code_length})"
            )
        if not np.isin(book, (0, 1)).all():
            raise ValueError("codebook entries must be bits")
        if self.kind == "localist":
            if self.code_length < len(self.alphabet) or not np.array_equal(
                book, np.eye(len(self.alphabet), self.code_length, dtype=np.uint8)
            ):
                raise ValueError("localist codebook must be 1-of-k")
        else:
            if (book.sum(axis=1) == 0).any():
                raise ValueError("distributed codes must be non-zero")
            if len({row.tobytes() for row in book}) != len(book):
                raise ValueError("distributed codes must be pairwise distinct")

    def __eq__(self, other):
        if not isinstance(other, EncoderSpec):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.alphabet == other.alphabet
            and self.code_length == other.code_length
            and np.array_equal(self.codebook, other.codebook)
        )

    def __hash__(self):
        return hash((self.kind, self.alphabet, self.code_length, self.codebook.tobytes()))

    def code(self, letter: str) -> np.ndarray:
        if letter not in self.alphabet:
            raise EncodingError(f"letter {letter!r} has no code")
        return self.codebook[self.alphabet.index(letter)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["letter", "bits"])
        for letter, row in zip(self.alphabet, self.codebook):
            writer.writerow([letter, "".join(str(int(b)) for b in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str = "distributed") -> "EncoderSpec":
        rows = list(csv.DictReader(io.StringIO(text)))
        alphabet = Alphabet(tuple(r["letter"] for r in rows))
        book = np.array([[int(b) for b in r["bits"]] for r in rows], dtype=np.uint8)
        return cls(kind, alphabet, book.shape[1], book)


def localist_encoder(alphabet: Alphabet = LATIN, k: int | None = None) -> EncoderSpec:
    k = len(alphabet) if k is None else k
    if k < len(alphabet):
        raise InfeasibleCodebook(f"k={k} too small for {len(alphabet)} localist codes")
    return EncoderSpec("localist", alphabet, k, np.eye(len(alphabet), k, dtype=np.uint8))


def fresh_distributed_codebook(alphabet: Alphabet, k: int, seed) -> EncoderSpec:
    """Random distinct non-zero ``k``-bit codes, one per letter.

    Each code is drawn uniformly from the non-zero k-bit strings; a code that
    collides with an earlier letter's code is redrawn.
    """
    if k < 1 or 2**k - 1 < len(alphabet):
        raise InfeasibleCodebook(
            f"only {max(2**k - 1, 0)} non-zero {k}-bit codes for {len(alphabet)} letters"
        )
    rng = np.random.default_rng(seed)
    seen: set[bytes] = set()
    rows = []
    for _ in alphabet:
        while True:
            row = rng.integers(0, 2, size=k, dtype=np.uint8)
            key = row.tobytes()
            if row.any() and key not in seen:
                break
        seen.add(key)
        rows.append(row)
    return EncoderSpec("distributed", alphabet, k, np.array(rows, dtype=np.uint8))


def encode(word: str, spec: EncoderSpec) -> np.ndarray:
    """Concatenated letter codes of ``word`` as a float vector of 0.0/1.0."""
    try:
        idx = [spec.alphabet.index(c) for c in word]
    except DomainError as exc:
        raise EncodingError(str(exc)) from None
    return spec.codebook[idx].reshape(-1).astype(np.float64)


def encode_many(words, spec: EncoderSpec) -> np.ndarray:
    words = list(words)
    if not words:
        return np.zeros((0, 0))
    return np.stack([encode(w, spec) for w in words])
