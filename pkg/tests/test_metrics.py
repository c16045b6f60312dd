import numpy as np
import pytest
from hypothesis import given, strategies as st

from ousm.errors import InvalidArgument
from ousm.metrics import (accuracy_at_threshold, flip_detection_report,
                          mann_whitney_auc, per_class_accuracy)


def test_accuracy_perfect_and_inverted():
    y = np.array([0, 1, 1, 0])
    p = np.array([0.1, 0.9, 0.8, 0.2])
    assert accuracy_at_threshold(p, y) == 1.0
    assert accuracy_at_threshold(1 - p, y) == 0.0


def test_accuracy_tie_goes_positive():
    y = np.array([0, 1, 0, 1])
    assert accuracy_at_threshold(np.full(4, 0.5), y) == 0.5
    assert accuracy_at_threshold(np.full(3, 0.5), np.array([1, 1, 0])) == pytest.approx(2 / 3)


def test_accuracy_accepts_probability_matrix():
    probs = np.array([[0.7, 0.3], [0.4, 0.6]])
    assert accuracy_at_threshold(probs, np.array([0, 1])) == 1.0


def test_accuracy_empty():
    with pytest.raises(InvalidArgument):
        accuracy_at_threshold(np.array([]), np.array([]))


@given(st.lists(st.floats(0, 1).filter(lambda v: v != 0.5), min_size=1, max_size=50),
       st.data())
def test_accuracy_complement(probs, data):
    p = np.array(probs)
    y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=p.size, max_size=p.size)))
    assert accuracy_at_threshold(p, y) == pytest.approx(1 - accuracy_at_threshold(p, 1 - y))


def test_per_class_accuracy():
    p = np.array([0.9, 0.2, 0.1, 0.6])
    y = np.array([1, 1, 0, 0])
    assert per_class_accuracy(p, y) == {0: 0.5, 1: 0.5}


def test_detection_perfect_and_uninformative():
    clean = np.zeros(10, dtype=int)
    obs = clean.copy()
    obs[:3] = 1
    lam = np.where(obs != clean, 0.0, 1.0)
    rep = flip_detection_report(lam, clean, obs)
    assert rep.auc_flip_detection == 1.0
    assert rep.mean_lambda_flipped == 0.0 and rep.mean_lambda_clean == 1.0
    assert flip_detection_report(np.full(10, 0.7), clean, obs).auc_flip_detection == 0.5


def test_detection_no_flips():
    y = np.zeros(5, dtype=int)
    rep = flip_detection_report(np.ones(5), y, y)
    assert rep.auc_flip_detection is None and rep.mean_lambda_flipped is None


def test_auc_matches_pair_count():
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 5, size=30), rng.integers(0, 5, size=20)
    pairs = sum((x > y) + 0.5 * (x == y) for x in a for y in b) / (30 * 20)
    assert mann_whitney_auc(a, b) == pytest.approx(pairs, abs=1e-12)


def test_random_lambda_auc_within_permutation_band():
    # permutation oracle: the null spread of AUC for these group sizes
    rng = np.random.default_rng(1)
    clean = np.zeros(1000, dtype=int)
    obs = clean.copy()
    obs[rng.choice(1000, 300, replace=False)] = 1
    lam = rng.random(1000)
    auc = flip_detection_report(lam, clean, obs).auc_flip_detection
    flipped = obs != clean
    null = [mann_whitney_auc(-lam[p], -lam[~p])
            for p in (rng.permutation(flipped) for _ in range(300))]
    lo, hi = np.quantile(null, [0.001, 0.999])
    assert lo <= auc <= hi
    assert abs(np.mean(null) - 0.5) < 0.01


@given(st.lists(st.floats(0.01, 0.99), min_size=6, max_size=30))
def test_auc_invariant_to_monotone_transform(vals):
    lam = np.array(vals)
    clean = np.zeros(lam.size, dtype=int)
    obs = clean.copy()
    obs[::3] = 1
    a = flip_detection_report(lam, clean, obs).auc_flip_detection
    b = flip_detection_report(np.log(lam) * 3 + 1, clean, obs).auc_flip_detection
    assert a == pytest.approx(b, abs=1e-12)
