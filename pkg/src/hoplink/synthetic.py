"""Synthetic benchmark graphs with held-out edge splits.

Both generators return in-memory datasets ready for the training harness:
a planted two-clique graph where held-out intra-clique edges are easy to
recover, and a stochastic block model with dense blocks and sparse
cross-block noise.
"""

from __future__ import annotations

import numpy as np

from .graph import DatasetSplits


def _holdout(edges: np.ndarray, valid_frac: float, test_frac: float,
             rng) -> DatasetSplits:
    m = edges.shape[0]
    order = rng.permutation(m)
    n_valid = int(round(m * valid_frac))
    n_test = int(round(m * test_frac))
    valid = edges[order[:n_valid]]
    test = edges[order[n_valid:n_valid + n_test]]
    train = edges[order[n_valid + n_test:]]
    return DatasetSplits(train, valid, test)


def two_clique_graph(clique_size: int = 20, valid_frac: float = 0.10,
                     test_frac: float = 0.05, seed: int = 0):
    """Two cliques joined by a single bridge edge, some edges held out.

    Returns ``(num_nodes, splits)``. Held-out intra-clique edges are easy:
    their endpoints share many neighbors, while random non-edges mostly
    cross the bridge.
    """
    s = clique_size
    edges = []
    for block in (0, s):
        for i in range(s):
            for j in range(i + 1, s):
                edges.append((block + i, block + j))
    edges.append((0, s))
    edges = np.asarray(edges, dtype=np.int64)
    rng = np.random.default_rng(seed)
    return 2 * s, _holdout(edges, valid_frac, test_frac, rng)


def sbm_graph(num_nodes: int = 1000, num_blocks: int = 4,
              p_in: float = 0.05, p_out: float = 0.002,
              valid_frac: float = 0.05, test_frac: float = 0.10,
              seed: int = 0):
    """Stochastic block model with contiguous equal blocks.

    Each pair inside a block is an edge with probability ``p_in``, each
    cross-block pair with ``p_out``. Returns ``(num_nodes, splits)``.
    """
    if num_nodes % num_blocks:
        raise ValueError("num_nodes must be divisible by num_blocks")
    rng = np.random.default_rng(seed)
    block = np.arange(num_nodes) // (num_nodes // num_blocks)
    prob = np.where(block[:, None] == block[None, :], p_in, p_out)
    draw = rng.random((num_nodes, num_nodes))
    upper = np.triu(draw < prob, k=1)
    src, dst = np.nonzero(upper)
    edges = np.stack([src, dst], axis=1).astype(np.int64)
    return num_nodes, _holdout(edges, valid_frac, test_frac, rng)
