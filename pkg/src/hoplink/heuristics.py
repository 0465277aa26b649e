"""Classical link-prediction heuristics, evaluated under the same harness.

Neighborhood scores (common neighbors, Adamic-Adar) work on sorted CSR rows;
the higher-order scores (rooted PageRank, SimRank) run exact fixed-point
iterations and are meant for desk-scale graphs.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, NumericError
from .graph import SparseGraph

SIMRANK_MAX_NODES = 2000


def _check_node(graph: SparseGraph, u: int) -> None:
    if not 0 <= u < graph.num_nodes:
        raise ValueError(f"node id {u} out of range")


def common_neighbors(graph: SparseGraph, u: int, v: int) -> int:
    """|neighbors(u) intersect neighbors(v)| via sorted-row intersection."""
    _check_node(graph, u)
    _check_node(graph, v)
    return int(np.intersect1d(graph.neighbors(u), graph.neighbors(v),
                              assume_unique=True).size)


def adamic_adar(graph: SparseGraph, u: int, v: int) -> float:
    """Sum of 1/ln(deg(w)) over common neighbors w; deg(w) <= 1 contributes 0."""
    _check_node(graph, u)
    _check_node(graph, v)
    common = np.intersect1d(graph.neighbors(u), graph.neighbors(v),
                            assume_unique=True)
    deg = graph.degrees[common]
    deg = deg[deg > 1]
    return float(np.sum(1.0 / np.log(deg)))


def rooted_pagerank(graph: SparseGraph, root: int, alpha: float = 0.85,
                    tol: float = 1e-10, max_iter: int = 10000) -> np.ndarray:
    """Stationary distribution of a walk with restart probability 1 - alpha.

    pi = (1 - alpha) e_root + alpha pi P with P the plain random-walk
    transition (no self-loops); mass on dangling (isolated) nodes returns to
    the root. Power iteration stops when the L1 change drops below ``tol``.
    """
    _check_node(graph, root)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    n = graph.num_nodes
    deg = graph.degrees.astype(np.float64)
    src = graph.arc_sources()
    dst = graph.col_targets
    dangling = deg == 0
    pi = np.zeros(n)
    pi[root] = 1.0
    for _ in range(max_iter):
        out = np.zeros(n)
        if src.size:
            np.add.at(out, dst, pi[src] / deg[src])
        out[root] += pi[dangling].sum()
        new = alpha * out
        new[root] += 1.0 - alpha
        if np.abs(new - pi).sum() < tol:
            return new
        pi = new
    raise NumericError(f"rooted PageRank did not converge within "
                       f"{max_iter} iterations (tol={tol})")


def rooted_pagerank_score(graph: SparseGraph, u: int, v: int,
                          alpha: float = 0.85, tol: float = 1e-10) -> float:
    """Symmetrized pair score: pi_u(v) + pi_v(u)."""
    return float(rooted_pagerank(graph, u, alpha, tol)[v]
                 + rooted_pagerank(graph, v, alpha, tol)[u])


def simrank(graph: SparseGraph, c: float = 0.8, iters: int = 5,
            max_nodes: int = SIMRANK_MAX_NODES) -> np.ndarray:
    """Full pairwise SimRank table after ``iters`` sweeps.

    s(u,v) <- c / (deg u * deg v) * sum over neighbor pairs of s(a,b) with
    s(u,u) = 1 fixed and s0 = identity. Each sweep touches the whole n x n
    table, so graphs above ``max_nodes`` are rejected.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie strictly between 0 and 1")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    n = graph.num_nodes
    if n > max_nodes:
        raise DataError(f"SimRank capped at {max_nodes} nodes, graph has {n}")
    deg = graph.degrees.astype(np.float64)
    P = graph.to_dense()
    nz = deg > 0
    P[nz] /= deg[nz, None]
    S = np.eye(n)
    for _ in range(iters):
        S = c * (P @ S @ P.T)
        np.fill_diagonal(S, 1.0)
    return S


HEURISTIC_KINDS = ("cn", "aa", "ppr", "simrank")


def heuristic_scores(graph: SparseGraph, kind: str, pairs, *,
                     alpha: float = 0.85, tol: float = 1e-10,
                     c: float = 0.8, iters: int = 5) -> np.ndarray:
    """Score a list of node pairs with one heuristic.

    Rooted PageRank vectors are computed once per distinct endpoint; the
    SimRank table is computed once for all pairs.
    """
    kind = str(kind).lower()
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if kind == "cn":
        return np.array([common_neighbors(graph, u, v) for u, v in pairs],
                        dtype=np.float64)
    if kind == "aa":
        return np.array([adamic_adar(graph, u, v) for u, v in pairs])
    if kind == "ppr":
        cache = {}
        for node in np.unique(pairs):
            cache[int(node)] = rooted_pagerank(graph, int(node), alpha, tol)
        return np.array([cache[int(u)][v] + cache[int(v)][u]
                         for u, v in pairs])
    if kind == "simrank":
        S = simrank(graph, c, iters)
        return S[pairs[:, 0], pairs[:, 1]].astype(np.float64)
    raise ValueError(f"unknown heuristic {kind!r}; "
                     f"expected one of {HEURISTIC_KINDS}")
