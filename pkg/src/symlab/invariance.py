"""Empirical checks of learner invariance and of the two rating theorems.

A learner L is invariant under a symmetry s when L(s(D), s(w)) == L(D, w).
If both L and the data D are invariant, L(D, w) == L(D, s(w)) for every w;
for randomized learners the same holds for expected scores.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .datasets import RatedDataset, random_dataset
from .learners import Learner
from .seeds import derive, parallel_map
from .symmetry import Symmetry, apply, apply_to_dataset, is_dataset_invariant

RELAXED_TOLERANCE = 1e-12


class PreconditionError(ValueError):
    """A hypothesis of the theorem being checked does not hold."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class InvarianceReport:
    learner_name: str
    symmetry_name: str
    dataset_id: str
    mode: str  # "deterministic" or "expectation"
    max_abs_deviation: float
    witness: Optional[tuple] = None  # (word, score for word, score for image)
    n_samples: int = 0
    ci_halfwidth: float = 0.0
    passed: bool = True
    relaxed: bool = False
    mean_difference: float = 0.0
    check: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness) if self.witness is not None else None
        return d

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (
            f"{status} {self.check} learner={self.learner_name} symmetry={self.symmetry_name} "
            f"dataset={self.dataset_id} max_abs_deviation={self.max_abs_deviation:.3g}"
        )
        if self.mode == "expectation":
            line += f" ci95={self.ci_halfwidth:.3g} n={self.n_samples}"
        if self.relaxed:
            line += " (relaxed to 1e-12)"
        if self.witness is not None:
            line += f" witness={self.witness}"
        return line


def _judge(deviations, words, lhs, rhs):
    """Max deviation, first witness above zero, and exact/relaxed verdict."""
    dev = float(np.max(deviations)) if len(deviations) else 0.0
    witness = None
    bad = np.flatnonzero(deviations > RELAXED_TOLERANCE)
    if bad.size:
        i = int(bad[0])
        witness = (words[i], float(lhs[i]), float(rhs[i]))
    passed = witness is None
    relaxed = passed and dev > 0.0
    return dev, witness, passed, relaxed


def check_algorithm_invariance(
    learner: Learner,
    sigma: Symmetry,
    datasets,
    words=None,
    dataset_id: str = "sample",
) -> InvarianceReport:
    """Compare L(D, w) with L(sigma(D), sigma(w)) over a grid of datasets and words."""
    if not learner.deterministic:
        raise ValueError("exact invariance checks need a deterministic learner")
    words = list(sigma.domain.words() if words is None else words)
    images = [apply(sigma, w) for w in words]
    worst = None
    n = 0
    for data in datasets:
        model = learner.train(data)
        model_s = learner.train(apply_to_dataset(sigma, data))
        lhs = np.array(learner.score_many(model, words))
        rhs = np.array(learner.score_many(model_s, images))
        dev = np.abs(lhs - rhs)
        n += len(words)
        result = _judge(dev, words, lhs, rhs)
        if worst is None or result[0] > worst[0] or (worst[1] is None and result[1] is not None):
            worst = result
    dev, witness, passed, relaxed = worst if worst is not None else (0.0, None, True, False)
    return InvarianceReport(
        learner.name, sigma.name, dataset_id, "deterministic", dev, witness,
        n_samples=n, passed=passed, relaxed=relaxed, check="algorithm-invariance",
    )


def sample_datasets(domain, seed, n: int = 4, extra=()) -> list[RatedDataset]:
    rng = np.random.default_rng(derive(seed, 0x5A))
    return list(extra) + [random_dataset(domain, rng) for _ in range(n)]


def theorem1_check(
    learner: Learner,
    sigma: Symmetry,
    data: RatedDataset,
    dataset_id: str = "data",
    words=None,
    n_probe_datasets: int = 4,
    seed: int = 0,
) -> InvarianceReport:
    """Verify L(D, w) == L(D, sigma(w)) for every word of the domain.

    Both hypotheses are checked first and a :class:`PreconditionError` names
    whichever fails: the data must be sigma-invariant, and the learner must
    be invariant on a probe sample of datasets (``data`` plus random ones).
    """
    problems = []
    if not learner.deterministic:
        problems.append(f"learner {learner.name} is randomized; use theorem2_check")
        raise PreconditionError("; ".join(problems))
    if not is_dataset_invariant(sigma, data):
        problems.append(f"dataset {dataset_id} is not invariant under {sigma.name}")
    probes = sample_datasets(sigma.domain, seed, n_probe_datasets, extra=[data])
    alg = check_algorithm_invariance(learner, sigma, probes, dataset_id=dataset_id)
    if not alg.passed:
        problems.append(
            f"learner {learner.name} is not invariant under {sigma.name} "
            f"(witness {alg.witness})"
        )
    if problems:
        raise PreconditionError("theorem 1 does not apply: " + "; ".join(problems), alg)

    words = list(sigma.domain.words() if words is None else words)
    model = learner.train(data)
    lhs = np.array(learner.score_many(model, words))
    rhs = np.array(learner.score_many(model, [apply(sigma, w) for w in words]))
    dev, witness, passed, relaxed = _judge(np.abs(lhs - rhs), words, lhs, rhs)
    return InvarianceReport(
        learner.name, sigma.name, dataset_id, "deterministic", dev, witness,
        n_samples=len(words), passed=passed, relaxed=relaxed or alg.relaxed, check="theorem1",
    )


def paired_ci(a, b, level: float = 0.95) -> tuple[float, float]:
    """Mean of ``a - b`` and the half-width of its paired-t confidence interval."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    n = len(d)
    if n < 2:
        raise ValueError("need at least two paired samples")
    mean = math.fsum(d) / n
    sd = float(np.std(d, ddof=1))
    half = float(stats.t.ppf(0.5 + level / 2, n - 1)) * sd / math.sqrt(n) if sd > 0 else 0.0
    return mean, half


def _one_rep(rep, learner, data, word, image, seed):
    model = learner.train(data, derive(seed, rep))
    a, b = learner.score_many(model, [word, image])
    return a, b


def theorem2_check(
    learner: Learner,
    sigma: Symmetry,
    data: RatedDataset,
    word: str,
    n_reps: int = 40,
    seed: int = 0,
    dataset_id: str = "data",
    jobs: int = 1,
) -> InvarianceReport:
    """Compare mean scores of ``word`` and ``sigma(word)`` over ``n_reps`` trainings.

    Each repetition trains once with its own derived seed and scores both
    words, so the comparison is paired. Passes when the 95% paired-t
    interval for the mean difference contains zero.
    """
    if n_reps < 2:
        raise ValueError("theorem2_check needs n_reps >= 2")
    if not is_dataset_invariant(sigma, data):
        raise PreconditionError(
            f"theorem 2 does not apply: dataset {dataset_id} is not invariant under {sigma.name}"
        )
    image = apply(sigma, word)
    fn = functools.partial(_one_rep, learner=learner, data=data, word=word, image=image, seed=seed)
    pairs = parallel_map(fn, range(n_reps), jobs)
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    mean, half = paired_ci(a, b)
    passed = abs(mean) <= half
    witness = None if passed else (word, math.fsum(a) / n_reps, math.fsum(b) / n_reps)
    return InvarianceReport(
        learner.name, sigma.name, dataset_id, "expectation", abs(mean), witness,
        n_samples=n_reps, ci_halfwidth=half, passed=passed, mean_difference=mean, check="theorem2",
    )
