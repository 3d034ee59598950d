"""Learners: ``train(D, seed) -> model`` then ``score(model, w) -> float``.

``learner(D, w, seed)`` is shorthand for training and scoring in one go.
Deterministic learners ignore the seed.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np

from .lbfgs import LbfgsConfig, OptimizeResult, minimize
from .seeds import as_seed_sequence
from .mlp import MLPParams, NetConfig, init_params, loss_and_grad, predict
from .words import LATIN, Alphabet, EncoderSpec, encode, encode_many, fresh_distributed_codebook, localist_encoder


class Learner:
    name = "learner"
    deterministic = True

    def train(self, data, seed=None):
        raise NotImplementedError

    def score(self, model, word: str) -> float:
        raise NotImplementedError

    def score_many(self, model, words) -> list[float]:
        return [self.score(model, w) for w in words]

    def __call__(self, data, word: str, seed=None) -> float:
        return self.score(self.train(data, seed), word)


@dataclass
class Memorizer(Learner):
    """Recall the mean rating of a word seen in training; ``default`` otherwise."""

    default: float = 0.5
    name = "memorizer"

    def train(self, data, seed=None):
        ratings = defaultdict(list)
        for w, r in data:
            ratings[w].append(r)
        return {w: math.fsum(rs) / len(rs) for w, rs in ratings.items()}

    def score(self, model, word):
        return model.get(word, self.default)


@dataclass
class PositionalUnigram(Learner):
    """Average over positions of the smoothed mean rating of the letter seen there.

    Per position the estimate is ``(sum + smoothing * 0.5) / (count + smoothing)``;
    a letter never seen at a position with zero smoothing scores 0.5.
    """

    smoothing: float = 1.0
    name = "pos-unigram"

    def __post_init__(self):
        if self.smoothing < 0:
            raise ValueError("smoothing must be non-negative")

    def train(self, data, seed=None):
        sums = defaultdict(list)
        for w, r in data:
            for i, c in enumerate(w):
                sums[i, c].append(r)
        return {key: (math.fsum(rs), len(rs)) for key, rs in sums.items()}

    def _position_value(self, model, i, c):
        total, count = model.get((i, c), (0.0, 0))
        denom = count + self.smoothing
        if denom == 0:
            return 0.5
        return (total + self.smoothing * 0.5) / denom

    def score(self, model, word):
        # fsum is exactly rounded, so the result is independent of position order
        return math.fsum(self._position_value(model, i, c) for i, c in enumerate(word)) / len(word)


@dataclass
class IdentityOracle(Learner):
    """Ignores the data: 1.0 when all letters are equal, else 0.0."""

    name = "identity-oracle"

    def train(self, data, seed=None):
        return None

    def score(self, model, word):
        return 1.0 if len(set(word)) == 1 else 0.0


@dataclass
class AsRandomized(Learner):
    """Present a deterministic learner through the randomized-learner interface."""

    inner: Learner
    deterministic = False

    @property
    def name(self):
        return self.inner.name

    def train(self, data, seed=None):
        return self.inner.train(data, seed)

    def score(self, model, word):
        return self.inner.score(model, word)


@dataclass
class TrainedNet:
    params: MLPParams
    encoder: EncoderSpec
    result: OptimizeResult | None = field(default=None, repr=False)


@dataclass
class MLPLearner(Learner):
    """Feedforward tanh network over concatenated letter codes, trained by L-BFGS.

    The seed fixes the distributed codebook (if any) and the initial weights.
    """

    config: NetConfig = field(default_factory=NetConfig)
    lbfgs: LbfgsConfig = field(default_factory=LbfgsConfig)
    alphabet: Alphabet = LATIN
    code_length: int = 26
    name = "mlp"
    deterministic = False

    def __post_init__(self):
        if self.config.input_dim % self.code_length:
            raise ValueError(
                f"input_dim {self.config.input_dim} is not a multiple of code length {self.code_length}"
            )

    def make_encoder(self, seed) -> EncoderSpec:
        if self.config.encoder == "localist":
            return localist_encoder(self.alphabet, self.code_length)
        if self.config.encoder == "distributed":
            return fresh_distributed_codebook(self.alphabet, self.code_length, seed)
        raise ValueError(f"unknown encoder {self.config.encoder!r}")

    def train(self, data, seed=None):
        code_seed, init_seed = as_seed_sequence(seed).spawn(2)
        encoder = self.make_encoder(code_seed)
        X = encode_many(data.words, encoder)
        r = data.ratings
        params = init_params(self.config, init_seed)
        if self.config.max_iterations == 0 or len(data) == 0:
            return TrainedNet(params, encoder)
        sizes = params.sizes

        def fun(theta):
            return loss_and_grad(MLPParams(sizes, theta), (X, r))

        cfg = replace(self.lbfgs, max_iterations=self.config.max_iterations)
        result = minimize(fun, None, params.flat, cfg)
        return TrainedNet(MLPParams(sizes, result.final_point), encoder, result)

    def score(self, model, word):
        return float(predict(model.params, encode(word, model.encoder)[None, :])[0])

    def score_many(self, model, words):
        words = list(words)
        if not words:
            return []
        return [float(s) for s in predict(model.params, encode_many(words, model.encoder))]


LEARNERS = {
    "memorizer": Memorizer,
    "pos-unigram": PositionalUnigram,
    "identity-oracle": IdentityOracle,
    "mlp": MLPLearner,
}


def memorizer(default: float = 0.5) -> Memorizer:
    return Memorizer(default)


def positional_unigram(smoothing: float = 1.0) -> PositionalUnigram:
    return PositionalUnigram(smoothing)


def identity_oracle() -> IdentityOracle:
    return IdentityOracle()


def nn_learner(config: NetConfig = NetConfig(), lbfgs: LbfgsConfig = LbfgsConfig()) -> MLPLearner:
    return MLPLearner(config, lbfgs)
