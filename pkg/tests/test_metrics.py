import numpy as np
import pytest

from hoplink import auc, hits_at_k, mrr


def hits_oracle(pos, neg, k):
    # brute force: sort negatives, compare each positive to the k-th best
    if k >= len(neg):
        return 1.0
    threshold = sorted(neg, reverse=True)[k - 1]
    return sum(1 for p in pos if p > threshold) / len(pos)


def mrr_oracle(pos, negs):
    contributions = []
    for p, row in zip(pos, negs):
        rank = 1 + sum(1 for x in row if x >= p)
        contributions.append(1.0 / rank)
    return float(np.mean(contributions))


def auc_oracle(pos, neg):
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def score_set(rng, tie_heavy):
    n_pos = int(rng.integers(1, 30))
    n_neg = int(rng.integers(1, 60))
    if tie_heavy:
        pos = rng.integers(0, 4, size=n_pos).astype(float)
        neg = rng.integers(0, 4, size=n_neg).astype(float)
    else:
        pos = rng.normal(size=n_pos)
        neg = rng.normal(size=n_neg)
    return pos, neg


class TestHitsAtK:
    def test_perfect_separation(self):
        assert hits_at_k([2.0, 3.0], [0.0, 1.0], 1) == 1.0

    def test_vacuous_threshold(self):
        assert hits_at_k([-5.0], [0.0, 1.0], 2) == 1.0
        assert hits_at_k([-5.0], [0.0], 7) == 1.0

    def test_worked_example(self):
        # negatives 0.00 .. 0.99; k=50 -> threshold 0.50; k=5 -> 0.95
        neg = np.arange(100) / 100.0
        assert hits_at_k([0.90], neg, 50) == 1.0
        assert hits_at_k([0.90], neg, 5) == 0.0

    def test_tie_is_a_miss(self):
        assert hits_at_k([0.5], [0.5, 0.1], 1) == 0.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for trial in range(100):
            pos, neg = score_set(rng, tie_heavy=trial % 2 == 0)
            k = int(rng.integers(1, len(neg) + 3))
            assert hits_at_k(pos, neg, k) == hits_oracle(
                pos.tolist(), neg.tolist(), k)

    def test_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(1)
        pos, neg = rng.normal(size=20), rng.normal(size=40)
        base = hits_at_k(pos, neg, 7)
        assert hits_at_k(np.exp(pos), np.exp(neg), 7) == base
        assert hits_at_k(3 * pos + 2, 3 * neg + 2, 7) == base

    def test_monotone_in_k(self):
        rng = np.random.default_rng(2)
        pos, neg = rng.normal(size=15), rng.normal(size=30)
        values = [hits_at_k(pos, neg, k) for k in range(1, 35)]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] == 1.0  # k >= |neg|

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            hits_at_k([], [1.0], 1)
        with pytest.raises(ValueError, match="negative"):
            hits_at_k([1.0], [], 1)


class TestMrr:
    def test_beats_all_negatives(self):
        assert mrr([5.0], np.array([[1.0, 2.0, 3.0]])) == 1.0

    def test_tie_halves_contribution(self):
        assert mrr([2.0], np.array([[2.0, 0.0]])) == 0.5

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n_pos = int(rng.integers(1, 21))
            negs = rng.integers(0, 5, size=(n_pos, 10)).astype(float)
            pos = rng.integers(0, 5, size=n_pos).astype(float)
            assert mrr(pos, negs) == pytest.approx(
                mrr_oracle(pos.tolist(), negs.tolist()), abs=1e-15)

    def test_ragged_lists_accepted(self):
        got = mrr([1.0, 3.0], [np.array([2.0]), np.array([1.0, 2.0, 4.0])])
        assert got == pytest.approx((1 / 2 + 1 / 2) / 2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mrr([], np.zeros((0, 3)))


class TestAuc:
    def test_all_ties_is_half(self):
        assert auc([1.0, 1.0], [1.0, 1.0, 1.0]) == 0.5

    def test_perfect_separation(self):
        assert auc([2.0, 3.0], [0.0, 1.0]) == 1.0

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(4)
        for trial in range(30):
            tie_heavy = trial % 2 == 0
            if tie_heavy:
                pos = rng.integers(0, 5, size=50).astype(float)
                neg = rng.integers(0, 5, size=50).astype(float)
            else:
                pos, neg = rng.normal(size=50), rng.normal(size=50)
            assert auc(pos, neg) == pytest.approx(
                auc_oracle(pos.tolist(), neg.tolist()), abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            pos, neg = score_set(rng, tie_heavy=True)
            assert 0.0 <= auc(pos, neg) <= 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            auc([], [1.0])
