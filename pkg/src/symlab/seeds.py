"""Seed plumbing: every random draw is traced back to one master seed."""
from __future__ import annotations

import numpy as np


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63)))
    return np.random.SeedSequence(seed)


def derive(master: int, *keys: int) -> np.random.SeedSequence:
    """Child seed addressed by ``keys``; distinct key tuples give independent streams."""
    return np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))


def parallel_map(fn, items, jobs: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally across ``jobs`` worker processes.

    Results come back in input order whatever the completion order.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
