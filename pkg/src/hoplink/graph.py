"""Immutable CSR graphs, normalized transition operators, and file ingestion.

Node ids are dense 0-based integers. Graphs are undirected: every arc is
stored in both directions, rows are strictly sorted, and self-loops are never
stored (transition construction adds one virtual self-loop per node).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

_NODES_HEADER = re.compile(r"#\s*nodes\s*=\s*(\d+)\s*$")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SparseGraph:
    """Undirected graph in compressed sparse row form.

    ``row_offsets`` has length ``num_nodes + 1``; the targets of node ``u``
    are ``col_targets[row_offsets[u]:row_offsets[u + 1]]``, strictly
    increasing. The arc set is symmetric and self-loop free; both are
    verified at construction time.
    """

    num_nodes: int
    row_offsets: np.ndarray
    col_targets: np.ndarray
    undirected: bool = True

    def __post_init__(self):
        object.__setattr__(self, "num_nodes", int(self.num_nodes))
        object.__setattr__(
            self, "row_offsets",
            _frozen(np.ascontiguousarray(self.row_offsets, dtype=np.int64)))
        object.__setattr__(
            self, "col_targets",
            _frozen(np.ascontiguousarray(self.col_targets, dtype=np.int64)))
        self._validate()

    def _validate(self):
        n, ro, ct = self.num_nodes, self.row_offsets, self.col_targets
        if n < 0:
            raise ValueError("num_nodes must be non-negative")
        if ro.shape != (n + 1,) or ro[0] != 0 or ro[-1] != ct.size:
            raise ValueError("row_offsets inconsistent with col_targets")
        deg = np.diff(ro)
        if np.any(deg < 0):
            raise ValueError("row_offsets must be non-decreasing")
        if ct.size == 0:
            return
        if ct.min() < 0 or ct.max() >= n:
            raise ValueError("column index out of range")
        src = np.repeat(np.arange(n, dtype=np.int64), deg)
        keys = src * n + ct
        if np.any(np.diff(keys) <= 0):
            raise ValueError("row targets must be strictly increasing")
        if np.any(src == ct):
            raise ValueError("self-loops must not be stored")
        if not np.array_equal(np.sort(ct * n + src), keys):
            raise ValueError("arc set must be symmetric")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    @property
    def num_edges(self) -> int:
        """Number of undirected edges (half the stored arc count)."""
        return self.col_targets.size // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.col_targets[self.row_offsets[u]:self.row_offsets[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def arc_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees)

    def arcs(self) -> np.ndarray:
        """All directed arcs as an (nnz, 2) array in CSR order."""
        return np.stack([self.arc_sources(), self.col_targets], axis=1)

    def edge_list(self) -> np.ndarray:
        """Undirected edges as an (m, 2) array with u < v, sorted."""
        src = self.arc_sources()
        mask = src < self.col_targets
        return np.stack([src[mask], self.col_targets[mask]], axis=1)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.num_nodes, self.num_nodes))
        arcs = self.arcs()
        dense[arcs[:, 0], arcs[:, 1]] = 1.0
        return dense


def build_csr(num_nodes: int, edges) -> SparseGraph:
    """Build a symmetric CSR graph from an edge list.

    Every input pair contributes both arc directions; duplicates (in either
    orientation) collapse and self-loops are dropped.
    """
    n = int(num_nodes)
    if n < 0:
        raise ValueError("num_nodes must be non-negative")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size:
        if edges.min() < 0 or edges.max() >= n:
            raise DataError(f"edge endpoint out of range for num_nodes={n}")
        edges = edges[edges[:, 0] != edges[:, 1]]
    if edges.size == 0:
        return SparseGraph(n, np.zeros(n + 1, np.int64), np.zeros(0, np.int64))
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    keys = np.unique(src * n + dst)
    src, dst = keys // n, keys % n
    counts = np.bincount(src, minlength=n)
    row_offsets = np.concatenate([[0], np.cumsum(counts)])
    return SparseGraph(n, row_offsets, dst)


class TransitionMatrix:
    """Normalized diffusion operator aligned with an augmented CSR.

    The stored structure is the graph plus one self-loop entry per node, so
    every row is non-empty and hop-0 information survives normalization.
    With ``A_hat = A + w*I`` and ``d_hat`` its row sums, the kinds are:

    - ``rw``:  row-stochastic ``D_hat^-1 A_hat``
    - ``sym``: symmetric ``D_hat^-1/2 A_hat D_hat^-1/2``
    - ``adj``: raw self-looped adjacency ``A_hat``

    Isolated nodes become fixed points (a single self-transition of 1).
    Instances are immutable and safe to share across threads.
    """

    KINDS = ("rw", "sym", "adj")

    def __init__(self, kind, graph, row_offsets, col_indices, values,
                 self_loop_weight=1.0):
        self.kind = kind
        self.graph = graph
        self.row_offsets = _frozen(np.ascontiguousarray(row_offsets, np.int64))
        self.col_indices = _frozen(np.ascontiguousarray(col_indices, np.int64))
        self.values = _frozen(np.ascontiguousarray(values, np.float64))
        self.self_loop_weight = float(self_loop_weight)
        self._values_t = None

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    def row_sums(self) -> np.ndarray:
        if self.num_nodes == 0:
            return np.zeros(0)
        return np.add.reduceat(self.values, self.row_offsets[:-1])

    def matmul(self, X: np.ndarray) -> np.ndarray:
        """T @ X for a dense (num_nodes, d) matrix X.

        Each output row accumulates its CSR entries sequentially, so the
        result is bitwise reproducible.
        """
        return self._spmm(self.values, X)

    def matmul_t(self, X: np.ndarray) -> np.ndarray:
        """T.transpose() @ X; for symmetric kinds this equals ``matmul``."""
        if self.kind == "rw":
            return self._spmm(self._transpose_values(), X)
        return self._spmm(self.values, X)

    def _spmm(self, values: np.ndarray, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] != self.num_nodes:
            raise ValueError(
                f"expected ({self.num_nodes}, d) matrix, got {X.shape}")
        if self.num_nodes == 0:
            return X.copy()
        contrib = values[:, None] * X[self.col_indices]
        return np.add.reduceat(contrib, self.row_offsets[:-1], axis=0)

    def _transpose_values(self) -> np.ndarray:
        # The sparsity pattern is symmetric, so the transpose reuses it with
        # permuted values: entry (u,v) takes the value stored at (v,u).
        if self._values_t is None:
            n = self.num_nodes
            src = np.repeat(np.arange(n, dtype=np.int64),
                            np.diff(self.row_offsets))
            keys = src * n + self.col_indices
            tkeys = self.col_indices * n + src
            self._values_t = _frozen(self.values[np.searchsorted(keys, tkeys)])
        return self._values_t

    def to_dense(self) -> np.ndarray:
        n = self.num_nodes
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.row_offsets))
        dense = np.zeros((n, n))
        dense[src, self.col_indices] = self.values
        return dense


def build_transition(graph: SparseGraph, kind: str,
                     self_loop_weight: float = 1.0) -> TransitionMatrix:
    """Build a transition operator of the given kind over ``graph``."""
    kind = str(kind).lower()
    if kind not in TransitionMatrix.KINDS:
        raise ValueError(f"unknown transition kind {kind!r}; "
                         f"expected one of {TransitionMatrix.KINDS}")
    if not self_loop_weight > 0:
        raise ValueError("self_loop_weight must be positive")
    n = graph.num_nodes
    deg = graph.degrees
    loop = np.arange(n, dtype=np.int64)
    src = np.concatenate([graph.arc_sources(), loop])
    dst = np.concatenate([graph.col_targets, loop])
    wts = np.concatenate([np.ones(graph.col_targets.size),
                          np.full(n, self_loop_weight)])
    order = np.lexsort((dst, src))
    src, dst, wts = src[order], dst[order], wts[order]
    row_offsets = np.concatenate([[0], np.cumsum(deg + 1)])
    d_hat = deg + self_loop_weight
    if kind == "rw":
        values = wts / d_hat[src]
    elif kind == "sym":
        values = wts / np.sqrt(d_hat[src] * d_hat[dst])
    else:
        values = wts
    return TransitionMatrix(kind, graph, row_offsets, dst, values,
                            self_loop_weight)


def ingest_edge_list(path) -> tuple[int, np.ndarray]:
    """Read a tab-separated edge list file.

    Each non-comment line is ``src<TAB>dst``; ``#`` starts a comment and an
    optional first line ``# nodes=N`` declares the node count (otherwise it
    is inferred as max id + 1). Self-loops and exact duplicate lines are
    dropped; the surviving pairs keep file order.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"edge list not found: {path}")
    declared = None
    max_id = -1
    pairs = []
    saw_data = False
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _NODES_HEADER.match(line)
                if m and lineno == 1:
                    declared = int(m.group(1))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: malformed edge line "
                                f"{line!r} (expected 'src<TAB>dst')")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed edge line "
                                f"{line!r} (non-integer id)") from None
            if u < 0 or v < 0:
                raise DataError(f"{path}:{lineno}: negative node id")
            if declared is not None and max(u, v) >= declared:
                raise DataError(f"{path}:{lineno}: node id {max(u, v)} "
                                f"exceeds declared nodes={declared}")
            saw_data = True
            max_id = max(max_id, u, v)
            if u != v:
                pairs.append((u, v))
    if not saw_data and declared is None:
        raise DataError(f"{path}: empty edge list")
    num_nodes = declared if declared is not None else max_id + 1
    if not pairs:
        return num_nodes, np.zeros((0, 2), dtype=np.int64)
    arr = np.asarray(pairs, dtype=np.int64)
    keys = arr[:, 0] * (max_id + 1) + arr[:, 1]
    _, first = np.unique(keys, return_index=True)
    return num_nodes, arr[np.sort(first)]


def _read_pairs(path, num_nodes=None, what="pair") -> np.ndarray:
    """Read a two-column id file in file order, no dedup, no header."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{what} file not found: {path}")
    pairs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: malformed {what} line {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed {what} line "
                                f"{line!r} (non-integer id)") from None
            if u < 0 or v < 0:
                raise DataError(f"{path}:{lineno}: negative node id")
            if num_nodes is not None and max(u, v) >= num_nodes:
                raise DataError(f"{path}:{lineno}: node id {max(u, v)} out of "
                                f"range for num_nodes={num_nodes}")
            pairs.append((u, v))
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.asarray(pairs, dtype=np.int64)


def load_features(path, num_nodes: int) -> np.ndarray:
    """Load a dense feature matrix: row i = whitespace-separated reals of node i."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"feature file not found: {path}")
    data = np.loadtxt(path, dtype=np.float64, comments="#", ndmin=2)
    if data.shape[0] != num_nodes:
        raise DataError(f"{path}: {data.shape[0]} feature rows for "
                        f"{num_nodes} nodes")
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: non-finite feature value")
    return data


@dataclass(frozen=True)
class DatasetSplits:
    """Train/valid/test positive pairs plus optional fixed negative sets.

    Positive splits are pairwise disjoint as unordered pairs and negatives
    never collide with any positive split; both are enforced on load.
    """

    train_edges: np.ndarray
    valid_edges: np.ndarray
    test_edges: np.ndarray
    valid_negatives: np.ndarray | None = None
    test_negatives: np.ndarray | None = None


def _pair_keys(pairs: np.ndarray, n: int) -> np.ndarray:
    if pairs.size == 0:
        return np.zeros(0, dtype=np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    hi = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    return lo * n + hi


def load_splits(split_dir, num_nodes: int | None = None) -> DatasetSplits:
    """Load train.tsv / valid.tsv / test.tsv (+ optional *_neg.tsv).

    When ``num_nodes`` is None it is inferred as max id + 1 over all files.
    """
    split_dir = Path(split_dir)
    if not split_dir.is_dir():
        raise DataError(f"split directory not found: {split_dir}")
    names = ["train", "valid", "test"]
    raw = {name: _read_pairs(split_dir / f"{name}.tsv", what=f"{name} split")
           for name in names}
    for name in ("valid_neg", "test_neg"):
        p = split_dir / f"{name}.tsv"
        raw[name] = _read_pairs(p, what=name) if p.exists() else None
    if num_nodes is None:
        ids = [p.max() for p in raw.values() if p is not None and p.size]
        if not ids:
            raise DataError(f"{split_dir}: all split files are empty")
        num_nodes = int(max(ids)) + 1
    for name, pairs in raw.items():
        if pairs is not None and pairs.size and pairs.max() >= num_nodes:
            raise DataError(f"{split_dir}/{name}.tsv: node id out of range "
                            f"for num_nodes={num_nodes}")
    keysets = {name: set(_pair_keys(raw[name], num_nodes).tolist())
               for name in names}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            common = keysets[a] & keysets[b]
            if common:
                k = next(iter(common))
                raise DataError(f"split overlap between {a} and {b}: "
                                f"pair ({k // num_nodes}, {k % num_nodes})")
    all_pos = keysets["train"] | keysets["valid"] | keysets["test"]
    for name in ("valid_neg", "test_neg"):
        if raw[name] is None:
            continue
        neg_keys = _pair_keys(raw[name], num_nodes)
        bad = set(neg_keys.tolist()) & all_pos
        if bad:
            k = next(iter(bad))
            raise DataError(f"{name} contains a positive pair "
                            f"({k // num_nodes}, {k % num_nodes})")
    return DatasetSplits(raw["train"], raw["valid"], raw["test"],
                         raw["valid_neg"], raw["test_neg"])
