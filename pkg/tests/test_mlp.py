import math

import numpy as np
import pytest

from symlab.mlp import (
    MLPParams,
    NetConfig,
    forward,
    grad,
    init_params,
    loss,
    loss_and_grad,
    n_params,
    predict,
)


def small(layers, width=8, input_dim=6):
    return NetConfig(input_dim=input_dim, hidden_layers=layers, hidden_width=width)


def random_batch(rng, n, d):
    X = rng.integers(0, 2, size=(n, d)).astype(float)
    r = rng.integers(0, 2, size=n).astype(float)
    return X, r


def central_diff(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_config_validation():
    with pytest.raises(ValueError):
        NetConfig(hidden_layers=4)
    with pytest.raises(ValueError):
        NetConfig(hidden_width=0)
    assert NetConfig().layer_sizes == (52, 256, 1)


def test_init_deterministic_and_bounded():
    cfg = small(2)
    a, b = init_params(cfg, 3), init_params(cfg, 3)
    assert a == b
    for W, bias in a.layers:
        assert np.all(np.abs(W) <= 1 / math.sqrt(W.shape[0]))
        assert np.all(bias == 0)
    for s in range(5):
        assert init_params(cfg, s) != init_params(cfg, s + 50)


def test_flatten_round_trip(tmp_path):
    p = init_params(small(3), 0)
    q = MLPParams.from_layers(p.layers)
    assert q == p
    path = tmp_path / "params.bin"
    p.save(path)
    assert MLPParams.load(path) == p
    raw = path.read_bytes()
    assert raw[:4] == (5).to_bytes(4, "little")
    assert len(raw) == 4 + 4 * 5 + 8 * n_params(p.sizes)


def test_zero_network_outputs_half():
    p = MLPParams((6, 8, 1), np.zeros(n_params((6, 8, 1))))
    assert forward(p, np.ones(6)) == 0.5


def test_hand_set_unit():
    p = MLPParams.from_layers([(np.array([[1.0], [-1.0]]), np.zeros(1)), (np.array([[1.0]]), np.zeros(1))])
    expected = 1 / (1 + math.exp(-math.tanh(1.0)))
    assert forward(p, [1.0, 0.0]) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.6816997, abs=1e-7)


def test_output_in_open_interval():
    rng = np.random.default_rng(0)
    p = MLPParams((4, 3, 1), rng.normal(scale=5, size=n_params((4, 3, 1))))
    s = predict(p, rng.normal(size=(100, 4)))
    assert np.all((s > 0) & (s < 1))


def test_loss_values():
    sizes = (2, 2, 1)
    zero = MLPParams(sizes, np.zeros(n_params(sizes)))
    X = np.array([[0.0, 1.0], [1.0, 1.0]])
    assert loss(zero, (X, np.array([1.0, 0.0]))) == pytest.approx(math.log(2))
    # output bias logit(0.25) gives s = 0.25 everywhere
    flat = np.zeros(n_params(sizes))
    flat[-1] = math.log(0.25 / 0.75)
    p = MLPParams(sizes, flat)
    assert forward(p, [0.0, 1.0]) == pytest.approx(0.25)
    assert loss(p, [([0.0, 1.0], 1.0)]) == pytest.approx(-math.log(0.25))
    assert loss(p, [([0.0, 1.0], 1.0)]) == pytest.approx(1.3863, abs=1e-4)


def test_loss_perfect_predictions_near_zero():
    sizes = (1, 1, 1)
    p = MLPParams(sizes, np.array([0.0, 0.0, 0.0, 60.0]))
    assert loss(p, [([0.0], 1.0)]) == pytest.approx(-math.log(1 - 1e-12), abs=1e-15)


def test_empty_batch():
    p = init_params(small(1), 0)
    with pytest.raises(ValueError):
        loss(p, [])


def test_grad_output_bias_stationary_at_zero():
    sizes = (6, 8, 1)
    p = MLPParams(sizes, np.zeros(n_params(sizes)))
    X, _ = random_batch(np.random.default_rng(0), 10, 6)
    g = grad(p, (X, np.full(10, 0.5)))
    assert g[-1] == 0.0


@pytest.mark.parametrize("layers", [1, 2, 3])
def test_grad_shape(layers):
    p = init_params(small(layers), 0)
    X, r = random_batch(np.random.default_rng(1), 5, 6)
    assert grad(p, (X, r)).shape == (n_params(p.sizes),)


@pytest.mark.parametrize("layers", [1, 2, 3])
def test_gradient_matches_finite_differences(layers):
    rng = np.random.default_rng(layers)
    cfg = small(layers, width=5, input_dim=4)
    for _ in range(5):
        p = init_params(cfg, rng.integers(1 << 30))
        flat = p.flat + rng.normal(scale=0.3, size=p.flat.shape)
        X, r = random_batch(rng, 7, 4)
        analytic = grad(MLPParams(p.sizes, flat), (X, r))
        numeric = central_diff(lambda t: loss(MLPParams(p.sizes, t), (X, r)), flat)
        assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


def test_input_permutation_equivariance():
    rng = np.random.default_rng(4)
    p = init_params(small(2, input_dim=10), 9)
    x = rng.integers(0, 2, size=10).astype(float)
    perm = rng.permutation(10)
    layers = p.layers
    W1, b1 = layers[0]
    permuted = MLPParams.from_layers([(W1[perm], b1)] + layers[1:])
    assert forward(permuted, x[perm]) == pytest.approx(forward(p, x), abs=1e-15)


def test_small_step_along_negative_gradient_decreases_loss():
    rng = np.random.default_rng(5)
    p = init_params(small(2), 1)
    X, r = random_batch(rng, 12, 6)
    f0, g = loss_and_grad(p, (X, r))
    for eta in (1e-2, 1e-3, 1e-4):
        assert loss(MLPParams(p.sizes, p.flat - eta * g), (X, r)) < f0
