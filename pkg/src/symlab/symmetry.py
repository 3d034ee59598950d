"""Bijections on a finite word domain and their action on rated datasets.

A :class:`Symmetry` is stored as a permutation table over the lexicographic
enumeration of its domain, so application, composition and bijectivity
checks are exact table operations.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .words import LATIN2, DomainError, Domain


@dataclass(frozen=True, eq=False)
class Symmetry:
    name: str
    domain: Domain
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if table.shape != (self.domain.size,):
            raise ValueError(f"table has shape {table.shape}, domain has {self.domain.size} words")
        if table.size and (table.min() < 0 or table.max() >= self.domain.size):
            raise ValueError("table entries outside the domain")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, domain: Domain, fn: Callable[[str], str], name: str = "custom") -> "Symmetry":
        """Tabulate ``fn`` over every word of ``domain``.

        ``fn`` need not be bijective; use :func:`verify_bijection` to check.
        """
        table = [domain.index(fn(w)) for w in domain.words()]
        return cls(name, domain, np.array(table, dtype=np.int64))

    def __call__(self, word: str) -> str:
        return apply(self, word)

    def __matmul__(self, other: "Symmetry") -> "Symmetry":
        return compose(self, other)

    def same_map(self, other: "Symmetry") -> bool:
        return self.domain == other.domain and np.array_equal(self.table, other.table)

    def inverse(self) -> "Symmetry":
        if not verify_bijection(self):
            raise ValueError(f"{self.name} is not a bijection")
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(self.domain.size)
        return Symmetry(f"inverse({self.name})", self.domain, inv)


def _check_domain(sigma: Symmetry, word: str) -> None:
    try:
        sigma.domain.validate(word)
    except DomainError as exc:
        raise DomainError(f"{sigma.name}: {exc}") from None


def apply(sigma: Symmetry, word: str) -> str:
    _check_domain(sigma, word)
    return sigma.domain.word_at(int(sigma.table[sigma.domain.index(word)]))


def apply_to_dataset(sigma: Symmetry, data):
    """Map every word of ``data`` through ``sigma``; ratings are untouched."""
    from .datasets import RatedDataset

    return RatedDataset([(apply(sigma, w), r) for w, r in data], domain=sigma.domain)


def is_dataset_invariant(sigma: Symmetry, data) -> bool:
    """True iff ``sigma(data)`` has exactly the same word-rating pairs (as a multiset)."""
    return Counter(apply_to_dataset(sigma, data).pairs) == Counter(data.pairs)


def verify_bijection(sigma: Symmetry) -> bool:
    n = sigma.domain.size
    seen = np.zeros(n, dtype=bool)
    seen[sigma.table] = True
    return bool(seen.all())


def compose(a: Symmetry, b: Symmetry) -> Symmetry:
    """``a`` after ``b``."""
    if a.domain != b.domain:
        raise DomainError(f"cannot compose {a.name} and {b.name}: different domains")
    return Symmetry(f"{a.name}*{b.name}", a.domain, a.table[b.table])


def identity(domain: Domain = LATIN2) -> Symmetry:
    return Symmetry("identity", domain, np.arange(domain.size))


def reversal(domain: Domain = LATIN2) -> Symmetry:
    """Reverse the order of letters in every word."""
    return Symmetry.from_function(domain, lambda w: w[::-1], "reversal")


def position_permutation(domain: Domain, position: int, mapping: dict[str, str], name: str | None = None) -> Symmetry:
    """Apply a letter permutation at one position, leaving other positions alone.

    ``position`` is 1-based. ``mapping`` lists only the letters that move; it
    must permute its own key set.
    """
    if not 1 <= position <= domain.length:
        raise DomainError(f"position {position} outside 1..{domain.length}")
    for c in list(mapping) + list(mapping.values()):
        if c not in domain.alphabet:
            raise DomainError(f"letter {c!r} not in alphabet {domain.alphabet}")
    if set(mapping) != set(mapping.values()):
        raise ValueError(f"mapping {mapping} is not a permutation of its letters")
    i = position - 1

    def fn(w: str) -> str:
        return w[:i] + mapping.get(w[i], w[i]) + w[i + 1:]

    if name is None:
        name = f"pos-perm:{position}:{cycle_notation(mapping)}"
    return Symmetry.from_function(domain, fn, name)


def yz_swap(domain: Domain = LATIN2, position: int = 2) -> Symmetry:
    """Swap Y and Z in the given (default: second) position."""
    return position_permutation(domain, position, {"Y": "Z", "Z": "Y"}, name="yz-swap")


def random_position_permutation(domain: Domain, rng, letters=None, position: int | None = None) -> Symmetry:
    """A uniformly random permutation of ``letters`` (default: whole alphabet) at one position."""
    rng = np.random.default_rng(rng)
    if position is None:
        position = int(rng.integers(1, domain.length + 1))
    letters = list(domain.alphabet.letters if letters is None else letters)
    shuffled = [letters[j] for j in rng.permutation(len(letters))]
    return position_permutation(domain, position, dict(zip(letters, shuffled)))


def random_fixing_permutation(domain: Domain, data, rng) -> Symmetry:
    """Random position permutation that leaves ``data`` unchanged.

    Only letters that never occur at the chosen position in ``data`` are
    shuffled, so the dataset is invariant by construction.
    """
    rng = np.random.default_rng(rng)
    position = int(rng.integers(1, domain.length + 1))
    used = {w[position - 1] for w, _ in data}
    free = [c for c in domain.alphabet.letters if c not in used]
    return random_position_permutation(domain, rng, letters=free, position=position)


def cycle_notation(mapping: dict[str, str]) -> str:
    out, done = [], set()
    for start in mapping:
        if start in done or mapping[start] == start:
            done.add(start)
            continue
        cyc, c = [], start
        while c not in done:
            done.add(c)
            cyc.append(c)
            c = mapping[c]
        out.append("(" + "".join(cyc) + ")")
    return "".join(out) or "()"


def parse_cycles(spec: str) -> dict[str, str]:
    """Parse cycle notation such as ``(YZ)`` or ``(ABC)(DE)`` into a letter map."""
    spec = spec.strip()
    if not re.fullmatch(r"(\([^()]*\))*", spec):
        raise ValueError(f"bad cycle spec {spec!r}")
    mapping: dict[str, str] = {}
    for cyc in re.findall(r"\(([^()]*)\)", spec):
        if len(set(cyc)) != len(cyc) or set(cyc) & set(mapping):
            raise ValueError(f"letters repeat in cycle spec {spec!r}")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            mapping[a] = b
    return mapping


def builtin_symmetries(domain: Domain = LATIN2) -> dict[str, Symmetry]:
    catalog = {"identity": identity(domain), "reversal": reversal(domain)}
    if "Y" in domain.alphabet and "Z" in domain.alphabet and domain.length >= 2:
        catalog["yz-swap"] = yz_swap(domain)
    return catalog


def parse_symmetry(name: str, domain: Domain = LATIN2) -> Symmetry:
    """Resolve a CLI symmetry name: a builtin or ``pos-perm:<position>:<cycles>``."""
    if name.startswith("pos-perm:"):
        parts = name.split(":", 2)
        if len(parts) != 3 or not parts[1].isdigit():
            raise ValueError(f"expected pos-perm:<position>:<cycles>, got {name!r}")
        return position_permutation(domain, int(parts[1]), parse_cycles(parts[2]))
    catalog = builtin_symmetries(domain)
    if name not in catalog:
        raise ValueError(f"unknown symmetry {name!r}; choose from {sorted(catalog)} or pos-perm:...")
    return catalog[name]
