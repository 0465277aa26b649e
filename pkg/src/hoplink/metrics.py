"""Ranking metrics: Hits@K, MRR, AUC.

Tie handling is pessimistic throughout: a positive tying the threshold is a
miss for Hits@K, a negative tying a positive pushes its rank down for MRR,
and AUC counts ties as one half.
"""

from __future__ import annotations

import numpy as np


def hits_at_k(pos_scores, neg_scores, k: int) -> float:
    """Fraction of positives scored strictly above the k-th best negative.

    When k >= |negatives| the threshold is vacuous and every positive is a
    hit.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0:
        raise ValueError("hits_at_k needs at least one positive score")
    if neg.size == 0:
        raise ValueError("hits_at_k needs at least one negative score")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= neg.size:
        return 1.0
    threshold = np.partition(neg, -k)[-k]
    return float(np.mean(pos > threshold))


def mrr(pos_scores, neg_scores_per_pos) -> float:
    """Mean reciprocal rank; each positive is ranked among its own negatives.

    rank = 1 + #{negatives with score >= positive score}.
    ``neg_scores_per_pos`` is a (P, N) array or a sequence of P score arrays.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    if pos.size == 0:
        raise ValueError("mrr needs at least one positive score")
    if isinstance(neg_scores_per_pos, np.ndarray) and \
            neg_scores_per_pos.ndim == 2:
        negs = np.asarray(neg_scores_per_pos, dtype=np.float64)
        if negs.shape[0] != pos.size or negs.shape[1] == 0:
            raise ValueError("negative matrix shape does not match positives")
        ranks = 1 + (negs >= pos[:, None]).sum(axis=1)
        return float(np.mean(1.0 / ranks))
    rows = list(neg_scores_per_pos)
    if len(rows) != pos.size:
        raise ValueError("one negative list per positive required")
    total = 0.0
    for p, row in zip(pos, rows):
        row = np.asarray(row, dtype=np.float64).ravel()
        if row.size == 0:
            raise ValueError("empty negative list")
        total += 1.0 / (1 + int((row >= p).sum()))
    return total / pos.size


def auc(pos_scores, neg_scores) -> float:
    """P(random positive outscores random negative), ties counting 1/2.

    Computed with the rank-sum (Mann-Whitney) statistic using average ranks
    for tied groups.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0:
        raise ValueError("auc needs both positive and negative scores")
    scores = np.concatenate([pos, neg])
    _, inverse, counts = np.unique(scores, return_inverse=True,
                                   return_counts=True)
    # average 1-based rank of each tie group: end_rank - (count - 1) / 2
    end_rank = np.cumsum(counts)
    avg_rank = end_rank - (counts - 1) / 2.0
    ranks = avg_rank[inverse]
    r_pos = ranks[:pos.size].sum()
    p, n = pos.size, neg.size
    return float((r_pos - p * (p + 1) / 2.0) / (p * n))
