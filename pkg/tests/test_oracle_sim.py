import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsum.errors import InvalidAlpha, Mismatch
from minsum.geometry import Labeling
from minsum.oracle_sim import corrupt_labels, match_labels, verify_error_rate


def test_alpha_zero_is_identity(rng):
    truth = Labeling(np.repeat([0, 1, 2], [4, 5, 6]), 3)
    pred, plan = corrupt_labels(truth, 0.0, rng)
    assert np.array_equal(pred.labels.labels, truth.labels) and plan.alpha_achieved == 0.0 and plan.moves == []


def test_two_clusters_point_two(rng):
    truth = Labeling(np.repeat([0, 1], 10), 2)
    pred, plan = corrupt_labels(truth, 0.2, rng)
    assert len(plan.moves) == 4  # two swapped pairs
    assert plan.alpha_achieved == pytest.approx(0.2)
    assert verify_error_rate(pred.labels, truth) == pytest.approx(0.2)


def test_invalid_alpha(rng):
    truth = Labeling([0, 1], 2)
    for a in (-0.1, 0.5, 0.7, float("nan")):
        with pytest.raises(InvalidAlpha):
            corrupt_labels(truth, a, rng)


def test_verify_examples():
    truth = Labeling(np.repeat([0, 1], 10), 2)
    assert verify_error_rate(truth, truth) == 0.0
    moved = truth.labels.copy()
    moved[0] = 1
    assert verify_error_rate(Labeling(moved, 2), truth) == pytest.approx(0.1)
    # disjoint: every predicted cluster misses its truth cluster entirely
    assert verify_error_rate(Labeling(np.repeat([1, 0], 10), 2), truth, match=False) == 1.0
    with pytest.raises(Mismatch):
        verify_error_rate(Labeling([0, 1], 2), truth)


def test_matching_relabels():
    truth = Labeling(np.repeat([0, 1, 2], 5), 3)
    perm = np.array([2, 0, 1])
    pred = Labeling(perm[truth.labels], 3)
    assert verify_error_rate(pred, truth) == 0.0
    assert verify_error_rate(pred, truth, match=False) == 1.0
    inv = match_labels(pred, truth)
    assert np.array_equal(inv[pred.labels], truth.labels)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 15), min_size=1, max_size=5), st.floats(0, 0.49), st.integers(0, 2**32 - 1))
def test_round_trip_and_sizes(sizes, alpha, seed):
    k = len(sizes)
    truth = Labeling(np.repeat(np.arange(k), sizes), k)
    pred, plan = corrupt_labels(truth, alpha, np.random.default_rng(seed))
    assert np.array_equal(pred.labels.sizes(), truth.sizes())
    assert plan.alpha_achieved <= alpha + 1e-12
    assert plan.recompute(truth) == plan.alpha_achieved
    assert verify_error_rate(pred.labels, truth, match=False) <= alpha + 1e-12
    assert verify_error_rate(pred.labels, truth) <= alpha + 1e-12


def test_large_k_uses_assignment_solver(rng):
    k = 60
    truth = Labeling(np.repeat(np.arange(k), 3), k)
    perm = rng.permutation(k)
    assert verify_error_rate(Labeling(perm[truth.labels], k), truth) == 0.0
