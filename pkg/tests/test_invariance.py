import numpy as np
import pytest

from symlab.datasets import eq1_sample_dataset, identity_training_set, random_dataset, sonority_invariant_training_set
from symlab.invariance import (
    PreconditionError,
    check_algorithm_invariance,
    paired_ci,
    theorem1_check,
    theorem2_check,
)
from symlab.learners import AsRandomized, Learner, MLPLearner, identity_oracle, memorizer, positional_unigram
from symlab.lbfgs import LbfgsConfig
from symlab.mlp import NetConfig
from symlab.symmetry import builtin_symmetries, random_position_permutation, reversal, yz_swap
from symlab.words import LATIN2


def probe_sets(n=3, seed=0):
    rng = np.random.default_rng(seed)
    return [random_dataset(LATIN2, rng) for _ in range(n)]


@pytest.mark.parametrize("name", ["identity", "reversal", "yz-swap"])
def test_memorizer_invariant_everywhere(name):
    rep = check_algorithm_invariance(memorizer(), builtin_symmetries()[name], probe_sets() + [identity_training_set(0)])
    assert rep.passed and rep.max_abs_deviation == 0 and rep.witness is None


def test_unigram_invariant_on_identity_set():
    rep = check_algorithm_invariance(positional_unigram(), yz_swap(), [identity_training_set(0)])
    assert rep.max_abs_deviation == 0 and rep.n_samples == 676


def test_identity_oracle_witness():
    rep = check_algorithm_invariance(identity_oracle(), yz_swap(), [identity_training_set(0)])
    assert not rep.passed
    assert rep.witness == ("YY", 1.0, 0.0)
    assert rep.max_abs_deviation == 1.0


def test_theorem1_unigram_yz():
    rep = theorem1_check(positional_unigram(), yz_swap(), identity_training_set(0))
    assert rep.passed and rep.max_abs_deviation == 0.0 and not rep.relaxed
    m = positional_unigram().train(identity_training_set(0))
    assert positional_unigram().score(m, "YY") == positional_unigram().score(m, "YZ")


def test_theorem1_memorizer_sonority():
    d = sonority_invariant_training_set(LATIN2)
    rep = theorem1_check(memorizer(), reversal(), d)
    assert rep.passed and rep.max_abs_deviation == 0.0
    assert memorizer()(d, "BA") == memorizer()(d, "AB")


def test_theorem1_refuses_non_invariant_learner():
    with pytest.raises(PreconditionError, match="learner identity-oracle is not invariant"):
        theorem1_check(identity_oracle(), yz_swap(), identity_training_set(0))


def test_theorem1_refuses_non_invariant_data():
    with pytest.raises(PreconditionError, match="not invariant under reversal"):
        theorem1_check(memorizer(), reversal(), eq1_sample_dataset())


def test_theorem1_refuses_randomized_learner():
    with pytest.raises(PreconditionError):
        theorem1_check(AsRandomized(memorizer()), yz_swap(), eq1_sample_dataset())


def test_deviation_monotone_in_word_sample():
    words = LATIN2.words()
    small = check_algorithm_invariance(identity_oracle(), yz_swap(), [eq1_sample_dataset()], words[:600])
    big = check_algorithm_invariance(identity_oracle(), yz_swap(), [eq1_sample_dataset()], words)
    assert big.max_abs_deviation >= small.max_abs_deviation


class Jittery(Learner):
    """Deterministic apart from a last-bit wobble, to exercise the relaxed tolerance."""

    name = "jittery"

    def train(self, data, seed=None):
        return {w for w, _ in data}

    def score(self, model, word):
        return 0.5 + (1e-16 if word.endswith("Z") else 0.0)


def test_relaxed_tolerance_is_flagged():
    rep = check_algorithm_invariance(Jittery(), yz_swap(), [eq1_sample_dataset()])
    assert rep.passed and rep.relaxed and 0 < rep.max_abs_deviation <= 1e-12


def test_paired_ci_matches_formula():
    a = np.array([1.0, 2.0, 3.0, 4.5])
    b = np.array([1.5, 1.0, 2.0, 3.0])
    d = a - b
    mean, half = paired_ci(a, b)
    # t_{0.975, 3} = 3.182446305284263
    assert mean == pytest.approx(d.mean())
    assert half == pytest.approx(3.182446305284263 * d.std(ddof=1) / 2)
    with pytest.raises(ValueError):
        paired_ci([1.0], [1.0])


def test_theorem2_degenerate_for_wrapped_deterministic():
    rep = theorem2_check(AsRandomized(positional_unigram()), yz_swap(), identity_training_set(0), "YY", n_reps=5)
    assert rep.passed and rep.max_abs_deviation == 0 and rep.ci_halfwidth == 0


def test_theorem2_identity_oracle_fails():
    rep = theorem2_check(AsRandomized(identity_oracle()), yz_swap(), identity_training_set(0), "YY", n_reps=10)
    assert not rep.passed
    assert rep.mean_difference == 1.0 and rep.ci_halfwidth == 0.0
    assert rep.witness == ("YY", 1.0, 0.0)


def test_theorem2_needs_two_reps():
    with pytest.raises(ValueError):
        theorem2_check(AsRandomized(memorizer()), yz_swap(), identity_training_set(0), "YY", n_reps=1)


def test_theorem2_refuses_non_invariant_data():
    with pytest.raises(PreconditionError):
        theorem2_check(AsRandomized(memorizer()), reversal(), eq1_sample_dataset(), "AB", n_reps=3)


def small_net():
    return MLPLearner(NetConfig(hidden_width=16, max_iterations=30), LbfgsConfig())


def test_theorem2_seed_deterministic():
    d = identity_training_set(0)
    a = theorem2_check(small_net(), yz_swap(), d, "YY", n_reps=4, seed=3)
    b = theorem2_check(small_net(), yz_swap(), d, "YY", n_reps=4, seed=3)
    assert a == b


def test_theorem2_small_network_passes():
    rep = theorem2_check(small_net(), yz_swap(), identity_training_set(0), "YY", n_reps=12, seed=1)
    assert rep.passed, rep.summary()


def test_report_serializes():
    rep = theorem1_check(positional_unigram(), yz_swap(), identity_training_set(0), dataset_id="identity")
    d = rep.to_dict()
    assert d["learner_name"] == "pos-unigram" and d["dataset_id"] == "identity" and d["witness"] is None
    assert "PASS" in rep.summary()
