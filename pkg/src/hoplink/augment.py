"""Train-time graph augmentation: random walks, co-occurrence edges, dropout.

All samplers are pure functions of (inputs, seed). Walk sampling derives one
RNG stream per start node from (seed, node_id), so results do not depend on
any execution order. Augmented views are applied to the training graph only;
evaluation always sees the unaugmented graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import SparseGraph, build_csr, _pair_keys

_REJECTION_ROUNDS = 1000


def _seed_entropy(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(s) for s in seed]


@dataclass(frozen=True)
class WalkSet:
    """Uniform random walks; each walk starts at its designated node.

    ``walk_length`` counts nodes, so a walk has at most walk_length - 1
    steps; only a dead end (isolated start node) cuts a walk short.
    """

    graph: SparseGraph
    walks: list
    walk_length: int
    walks_per_node: int
    seed: int


def sample_walks(graph: SparseGraph, walk_length: int, walks_per_node: int,
                 seed=0) -> WalkSet:
    """``walks_per_node`` uniform random walks from every node."""
    if walk_length < 1:
        raise ValueError("walk_length must be >= 1")
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    entropy = _seed_entropy(seed)
    walks = []
    for node in range(graph.num_nodes):
        rng = np.random.default_rng(entropy + [node])
        for _ in range(walks_per_node):
            walk = [node]
            cur = node
            for _ in range(walk_length - 1):
                nbrs = graph.neighbors(cur)
                if nbrs.size == 0:
                    break
                cur = int(nbrs[rng.integers(nbrs.size)])
                walk.append(cur)
            walks.append(np.asarray(walk, dtype=np.int64))
    return WalkSet(graph, walks, walk_length, walks_per_node, seed)


def cooccurrence_augment(walks: WalkSet, window: int, tau: int) -> np.ndarray:
    """Non-edge pairs co-occurring within ``window`` walk positions >= tau times.

    Counts are over unordered pairs across all walks; the result is a sorted
    (m, 2) array, independent of walk order.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    graph = walks.graph
    counts: dict[tuple[int, int], int] = {}
    for walk in walks.walks:
        length = len(walk)
        for i in range(length):
            u = int(walk[i])
            for j in range(i + 1, min(i + window, length - 1) + 1):
                v = int(walk[j])
                if u == v:
                    continue
                key = (u, v) if u < v else (v, u)
                counts[key] = counts.get(key, 0) + 1
    pairs = [key for key, c in counts.items()
             if c >= tau and not graph.has_edge(*key)]
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.asarray(sorted(pairs), dtype=np.int64)


@dataclass(frozen=True)
class AugmentedGraphView:
    """A base graph with edges added and removed; base stays untouched.

    The effective edge set is (base minus dropped) union added; it stays
    symmetric and self-loop free because both lists hold undirected pairs.
    """

    base: SparseGraph
    added_edges: np.ndarray
    dropped_edges: np.ndarray

    def __post_init__(self):
        added = np.asarray(self.added_edges, dtype=np.int64).reshape(-1, 2)
        dropped = np.asarray(self.dropped_edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "added_edges", added)
        object.__setattr__(self, "dropped_edges", dropped)
        n = self.base.num_nodes
        akeys = set(_pair_keys(added, n).tolist())
        dkeys = set(_pair_keys(dropped, n).tolist())
        if akeys & dkeys:
            raise ValueError("added and dropped edges overlap")
        for u, v in added:
            if self.base.has_edge(u, v):
                raise ValueError(f"added edge ({u}, {v}) already in base")
            if u == v:
                raise ValueError("added self-loop")
        for u, v in dropped:
            if not self.base.has_edge(u, v):
                raise ValueError(f"dropped edge ({u}, {v}) not in base")

    def to_graph(self) -> SparseGraph:
        """Materialize the effective edge set as a fresh CSR graph."""
        n = self.base.num_nodes
        edges = self.base.edge_list()
        if self.dropped_edges.size:
            keep = ~np.isin(_pair_keys(edges, n),
                            _pair_keys(self.dropped_edges, n))
            edges = edges[keep]
        if self.added_edges.size:
            edges = np.vstack([edges, self.added_edges])
        return build_csr(n, edges)


def edge_dropout(graph: SparseGraph, p: float, seed=0) -> AugmentedGraphView:
    """Drop each undirected edge independently with probability p."""
    if not 0.0 <= p < 1.0:
        raise ValueError("dropout probability must satisfy 0 <= p < 1")
    edges = graph.edge_list()
    rng = np.random.default_rng(_seed_entropy(seed))
    mask = rng.random(edges.shape[0]) < p
    return AugmentedGraphView(graph, np.zeros((0, 2), dtype=np.int64),
                              edges[mask])


def augment_graph(graph: SparseGraph, *, walk_length: int, walks_per_node: int,
                  window: int, tau: int, dropout_p: float,
                  seed=0) -> AugmentedGraphView:
    """One training-epoch view: co-occurrence additions plus edge dropout."""
    entropy = _seed_entropy(seed)
    walks = sample_walks(graph, walk_length, walks_per_node,
                         seed=entropy + [1])
    added = cooccurrence_augment(walks, window, tau)
    dropped = edge_dropout(graph, dropout_p, seed=entropy + [2]).dropped_edges
    return AugmentedGraphView(graph, added, dropped)


def _member(keys: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    if sorted_keys.size == 0:
        return np.zeros(keys.shape, dtype=bool)
    idx = np.searchsorted(sorted_keys, keys)
    idx[idx == sorted_keys.size] = 0
    return sorted_keys[idx] == keys


def sample_negatives(graph: SparseGraph, pos_pairs, Q: int, seed=0,
                     exclude=None) -> np.ndarray:
    """Q corrupted pairs (u, v') per positive (u, v); v' uniform over nodes.

    A candidate is rejected and redrawn if it is an edge, a positive, in
    ``exclude``, or a self-pair. Nodes failing 1000 redraw rounds raise.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    pos = np.asarray(pos_pairs, dtype=np.int64).reshape(-1, 2)
    n = graph.num_nodes
    if pos.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if n < 2:
        raise DataError("cannot sample negatives on a graph with < 2 nodes")
    arc_keys = graph.arcs()
    arc_keys = arc_keys[:, 0] * n + arc_keys[:, 1]  # sorted by construction
    pos_keys = np.unique(_pair_keys(pos, n))
    excl = np.asarray(list(exclude) if exclude is not None else [],
                      dtype=np.int64).reshape(-1, 2)
    excl_keys = np.unique(_pair_keys(excl, n)) if excl.size \
        else np.zeros(0, dtype=np.int64)
    rng = np.random.default_rng(_seed_entropy(seed))
    us = np.repeat(pos[:, 0], Q)
    out = np.full(us.size, -1, dtype=np.int64)
    open_slots = np.arange(us.size)
    for _ in range(_REJECTION_ROUNDS):
        if open_slots.size == 0:
            break
        cand = rng.integers(0, n, size=open_slots.size)
        u = us[open_slots]
        ok = cand != u
        ok &= ~_member(u * n + cand, arc_keys)
        ukeys = np.minimum(u, cand) * n + np.maximum(u, cand)
        ok &= ~_member(ukeys, pos_keys)
        if excl_keys.size:
            ok &= ~_member(ukeys, excl_keys)
        out[open_slots[ok]] = cand[ok]
        open_slots = open_slots[~ok]
    if open_slots.size:
        u = int(us[open_slots[0]])
        raise DataError(f"no negative found for source node {u} after "
                        f"{_REJECTION_ROUNDS} rounds; graph too dense")
    return np.stack([us, out], axis=1)


def write_walks(walks: WalkSet, path) -> None:
    """Dump one walk per line, node ids separated by single spaces."""
    with open(path, "w", encoding="utf-8") as fh:
        for walk in walks.walks:
            fh.write(" ".join(str(int(x)) for x in walk) + "\n")
