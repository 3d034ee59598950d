"""Multilayer perceptron with tanh hidden layers and a sigmoid output unit.

Parameters live in one flat float64 vector so the optimizer can treat the
network as an ordinary function of R^P. Weight matrices have shape
``(fan_in, fan_out)`` and are stored row-major, each followed by its bias.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

EPS = 1e-12


class NumericError(FloatingPointError):
    pass


@dataclass(frozen=True)
class NetConfig:
    input_dim: int = 52
    hidden_layers: int = 1
    hidden_width: int = 256
    encoder: str = "localist"
    init_scale_rule: str = "uniform-fan-in"
    max_iterations: int = 100

    def __post_init__(self):
        if self.input_dim < 1 or self.hidden_width < 1:
            raise ValueError("layer sizes must be positive")
        if not 1 <= self.hidden_layers <= 3:
            raise ValueError("hidden_layers must be 1, 2 or 3")
        if self.init_scale_rule != "uniform-fan-in":
            raise ValueError(f"unknown init rule {self.init_scale_rule!r}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim,) + (self.hidden_width,) * self.hidden_layers + (1,)


def _shapes(sizes):
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        yield (fan_in, fan_out), (fan_out,)


def n_params(sizes) -> int:
    return sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))


@dataclass(frozen=True, eq=False)
class MLPParams:
    sizes: tuple[int, ...]
    flat: np.ndarray

    def __post_init__(self):
        flat = np.ascontiguousarray(self.flat, dtype=np.float64)
        if flat.shape != (n_params(self.sizes),):
            raise ValueError(f"expected {n_params(self.sizes)} parameters, got {flat.shape}")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "flat", flat)

    @property
    def layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(weights, bias) views into ``flat``, input layer first."""
        out, pos = [], 0
        for wshape, bshape in _shapes(self.sizes):
            nw = wshape[0] * wshape[1]
            W = self.flat[pos:pos + nw].reshape(wshape)
            pos += nw
            b = self.flat[pos:pos + bshape[0]]
            pos += bshape[0]
            out.append((W, b))
        return out

    @classmethod
    def from_layers(cls, layers) -> "MLPParams":
        sizes = [np.shape(layers[0][0])[0]] + [np.shape(W)[1] for W, _ in layers]
        flat = np.concatenate([np.concatenate([np.ravel(W), np.ravel(b)]) for W, b in layers])
        return cls(tuple(sizes), flat)

    def __eq__(self, other):
        if not isinstance(other, MLPParams):
            return NotImplemented
        return self.sizes == other.sizes and np.array_equal(self.flat, other.flat)

    def to_bytes(self) -> bytes:
        """Shape header (count, then sizes, uint32 LE) followed by float64 LE values."""
        header = struct.pack(f"<I{len(self.sizes)}I", len(self.sizes), *self.sizes)
        return header + self.flat.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "MLPParams":
        (n,) = struct.unpack_from("<I", data, 0)
        sizes = struct.unpack_from(f"<{n}I", data, 4)
        flat = np.frombuffer(data, dtype="<f8", offset=4 + 4 * n).astype(np.float64)
        return cls(sizes, flat)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "MLPParams":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def init_params(config: NetConfig, seed) -> MLPParams:
    """Weights i.i.d. Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases zero."""
    rng = np.random.default_rng(seed)
    layers = []
    for (fan_in, fan_out), _ in _shapes(config.layer_sizes):
        bound = 1.0 / np.sqrt(fan_in)
        layers.append((rng.uniform(-bound, bound, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return MLPParams.from_layers(layers)


def _sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward(params: MLPParams, X: np.ndarray):
    acts = [X]
    h = X
    layers = params.layers
    for W, b in layers[:-1]:
        h = np.tanh(h @ W + b)
        acts.append(h)
    W, b = layers[-1]
    s = _sigmoid((h @ W + b)[:, 0])
    if not np.all(np.isfinite(s)):
        raise NumericError("non-finite network output")
    return s, acts


def predict(params: MLPParams, X) -> np.ndarray:
    """Network outputs in (0, 1) for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != params.sizes[0]:
        raise ValueError(f"input width {X.shape[1]} != {params.sizes[0]}")
    return _forward(params, X)[0]


def forward(params: MLPParams, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("forward takes a single input vector; use predict for batches")
    return float(predict(params, x[None, :])[0])


def _batch(batch):
    if isinstance(batch, tuple) and len(batch) == 2 and isinstance(batch[0], np.ndarray):
        X, r = batch
    else:
        batch = list(batch)
        if not batch:
            raise ValueError("empty batch")
        X = np.stack([np.asarray(x, dtype=np.float64) for x, _ in batch])
        r = np.array([float(y) for _, y in batch])
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if len(r) == 0:
        raise ValueError("empty batch")
    if np.any((r < 0) | (r > 1)):
        raise ValueError("ratings must lie in [0, 1]")
    return X, r


def _bce(s, r):
    p = np.clip(s, EPS, 1 - EPS)
    return -np.mean(r * np.log(p) + (1 - r) * np.log(1 - p))


def loss(params: MLPParams, batch) -> float:
    """Mean binary cross-entropy, probabilities clamped to [EPS, 1-EPS].

    ``batch`` is either a sequence of ``(input, rating)`` pairs or an
    ``(X, ratings)`` tuple of arrays.
    """
    X, r = _batch(batch)
    s, _ = _forward(params, X)
    return float(_bce(s, r))


def loss_and_grad(params: MLPParams, batch) -> tuple[float, np.ndarray]:
    X, r = _batch(batch)
    s, acts = _forward(params, X)
    n = len(r)
    value = float(_bce(s, r))

    # d loss / d logit; zero where the clamp is active
    dz = (s - r) / n
    dz[(s < EPS) | (s > 1 - EPS)] = 0.0
    delta = dz[:, None]

    grads = []
    layers = params.layers
    for k in range(len(layers) - 1, -1, -1):
        W, _ = layers[k]
        grads.append((acts[k].T @ delta, delta.sum(axis=0)))
        if k:
            delta = (delta @ W.T) * (1 - acts[k] ** 2)
    grads.reverse()
    flat = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
    return value, flat


def grad(params: MLPParams, batch) -> np.ndarray:
    return loss_and_grad(params, batch)[1]
