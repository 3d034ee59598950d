"""Rated training datasets and the word batteries used to probe learners."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .words import LATIN2, Alphabet, Domain, DomainError

TRAIN_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWX"
NOVEL_LETTERS = "YZ"

# segment -> sonority, five classes of two letters each
SONORITY = {
    "A": 5, "O": 5,
    "W": 4, "Y": 4,
    "M": 3, "N": 3,
    "V": 2, "Z": 2,
    "B": 1, "D": 1,
}
SONORITY_DOMAIN = Domain(Alphabet.from_string("".join(sorted(SONORITY))), 2)

BATTERY_CATEGORIES = ("YY", "ZZ", "XY", "YZ", "XZ", "ZY")


@dataclass(frozen=True)
class RatedDataset:
    """A multiset of ``(word, rating)`` pairs.

    Iteration follows construction order, but equality ignores order.
    """

    pairs: tuple[tuple[str, float], ...]
    domain: Domain | None = field(default=None, compare=False)

    def __init__(self, pairs, domain: Domain | None = None):
        clean = []
        for w, r in pairs:
            r = float(r)
            if not math.isfinite(r):
                raise ValueError(f"rating for {w!r} is not finite")
            if domain is not None:
                domain.validate(w)
            clean.append((w, r))
        if domain is None and clean:
            lengths = {len(w) for w, _ in clean}
            if len(lengths) != 1:
                raise DomainError(f"words of mixed lengths {sorted(lengths)}")
        object.__setattr__(self, "pairs", tuple(clean))
        object.__setattr__(self, "domain", domain)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other):
        if not isinstance(other, RatedDataset):
            return NotImplemented
        return Counter(self.pairs) == Counter(other.pairs)

    def __hash__(self):
        return hash(frozenset(Counter(self.pairs).items()))

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.pairs]

    @property
    def ratings(self) -> np.ndarray:
        return np.array([r for _, r in self.pairs], dtype=np.float64)

    def with_domain(self, domain: Domain) -> "RatedDataset":
        return RatedDataset(self.pairs, domain)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "rating"])
        for w, r in self.pairs:
            writer.writerow([w, repr(r)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domain: Domain | None = None) -> "RatedDataset":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or {"word", "rating"} - set(reader.fieldnames):
            raise ValueError("dataset CSV needs a 'word,rating' header")
        return cls([(row["word"], float(row["rating"])) for row in reader], domain)


def identity_training_set(seed, n_negative: int = 48) -> RatedDataset:
    """24 doubled letters AA..XX rated 1 plus ``n_negative`` distinct mismatched words rated 0.

    All letters come from A..X, so no word contains Y or Z. The mismatched
    words are sampled without replacement from the 24*23 ordered pairs.
    """
    rng = np.random.default_rng(seed)
    positives = [(c + c, 1.0) for c in TRAIN_LETTERS]
    mismatched = [a + b for a in TRAIN_LETTERS for b in TRAIN_LETTERS if a != b]
    chosen = rng.choice(len(mismatched), size=n_negative, replace=False)
    negatives = [(mismatched[i], 0.0) for i in chosen]
    return RatedDataset(positives + negatives, LATIN2)


def test_battery(seed) -> list[str]:
    """The six probe words YY, ZZ, xY, YZ, xZ, ZY with each x drawn from A..X."""
    rng = np.random.default_rng(seed)
    x1, x2 = (TRAIN_LETTERS[i] for i in rng.integers(0, len(TRAIN_LETTERS), size=2))
    return ["YY", "ZZ", x1 + "Y", "YZ", x2 + "Z", "ZY"]


test_battery.__test__ = False  # keep pytest from collecting it


def sonority_grammar(word: str, table: dict[str, int] = SONORITY) -> bool:
    """Non-decreasing sonority from first to second letter."""
    try:
        first, second = (table[c] for c in word)
    except KeyError as exc:
        raise LookupError(f"no sonority for {exc.args[0]!r}") from None
    return second >= first


def sonority_invariant_training_set(domain: Domain = SONORITY_DOMAIN, table: dict[str, int] = SONORITY) -> RatedDataset:
    """Every ordered pair of equal-sonority letters, rated 1."""
    letters = sorted(table)
    return RatedDataset(
        [(a + b, 1.0) for a in letters for b in letters if table[a] == table[b]], domain
    )


def eq1_sample_dataset(domain: Domain = LATIN2) -> RatedDataset:
    """Three doubled words rated 1 and three mismatched words rated 0."""
    return RatedDataset(
        [("CC", 1), ("AA", 1), ("EE", 1), ("GA", 0), ("EH", 0), ("RA", 0)], domain
    )


def random_dataset(domain: Domain, rng, max_size: int = 40, ratings=(0.0, 0.5, 1.0)) -> RatedDataset:
    """Random ratings over a random subset of words; duplicates possible."""
    rng = np.random.default_rng(rng)
    n = int(rng.integers(0, max_size + 1))
    idx = rng.integers(0, domain.size, size=n)
    r = rng.choice(np.asarray(ratings, dtype=np.float64), size=n)
    return RatedDataset([(domain.word_at(int(i)), float(x)) for i, x in zip(idx, r)], domain)


DATASETS = {
    "identity": lambda seed=0: identity_training_set(seed),
    "sonority": lambda seed=0: sonority_invariant_training_set(LATIN2),
    "eq1": lambda seed=0: eq1_sample_dataset(),
}
