import numpy as np
import pytest

from hoplink import (DataError, NumericError, adamic_adar, build_csr,
                     common_neighbors, heuristic_scores, rooted_pagerank,
                     rooted_pagerank_score, simrank)
from tests.test_graph import random_graph

INV_LOG2 = 1.4426950408889634  # 1 / ln 2


def neighbor_set(graph, u):
    return set(graph.neighbors(u).tolist())


def cn_oracle(graph, u, v):
    return len(neighbor_set(graph, u) & neighbor_set(graph, v))


def aa_oracle(graph, u, v):
    total = 0.0
    for w in neighbor_set(graph, u) & neighbor_set(graph, v):
        d = len(neighbor_set(graph, w))
        if d > 1:
            total += 1.0 / np.log(d)
    return total


def ppr_dense_oracle(graph, root, alpha):
    # dense linear solve of (I - alpha P^T) pi = (1 - alpha) e_root,
    # dangling rows redirected to the root
    n = graph.num_nodes
    P = graph.to_dense()
    deg = P.sum(axis=1)
    for i in range(n):
        if deg[i] > 0:
            P[i] /= deg[i]
        else:
            P[i, root] = 1.0
    e = np.zeros(n)
    e[root] = 1.0
    return np.linalg.solve(np.eye(n) - alpha * P.T, (1 - alpha) * e)


def simrank_naive(graph, c, iters):
    n = graph.num_nodes
    S = np.eye(n)
    deg = graph.degrees
    for _ in range(iters):
        S_new = np.zeros((n, n))
        for u in range(n):
            for v in range(n):
                if u == v:
                    S_new[u, v] = 1.0
                    continue
                if deg[u] == 0 or deg[v] == 0:
                    continue
                acc = 0.0
                for a in graph.neighbors(u):
                    for b in graph.neighbors(v):
                        acc += S[a, b]
                S_new[u, v] = c * acc / (deg[u] * deg[v])
        S = S_new
    return S


class TestCommonNeighbors:
    def test_triangle(self):
        g = build_csr(3, [(0, 1), (1, 2), (0, 2)])
        assert common_neighbors(g, 0, 1) == 1

    def test_disjoint_edges(self):
        g = build_csr(4, [(0, 1), (2, 3)])
        assert common_neighbors(g, 0, 2) == 0

    def test_matches_set_oracle(self):
        rng = np.random.default_rng(0)
        g = random_graph(rng, 15, p=0.3)
        for u in range(15):
            for v in range(15):
                assert common_neighbors(g, u, v) == cn_oracle(g, u, v)

    def test_out_of_range(self):
        g = build_csr(2, [(0, 1)])
        with pytest.raises(ValueError, match="range"):
            common_neighbors(g, 0, 5)


class TestAdamicAdar:
    def test_triangle(self):
        g = build_csr(3, [(0, 1), (1, 2), (0, 2)])
        assert adamic_adar(g, 0, 1) == pytest.approx(INV_LOG2, abs=1e-12)

    def test_no_common_neighbors(self):
        g = build_csr(4, [(0, 1), (2, 3)])
        assert adamic_adar(g, 0, 2) == 0.0

    def test_matches_formula_oracle(self):
        rng = np.random.default_rng(1)
        g = random_graph(rng, 15, p=0.3)
        for u in range(15):
            for v in range(15):
                assert adamic_adar(g, u, v) == pytest.approx(
                    aa_oracle(g, u, v), abs=1e-12)

    def test_degree_one_guard(self):
        # querying (u, u) makes a degree-1 common neighbor possible
        g = build_csr(3, [(0, 1)])
        assert adamic_adar(g, 0, 0) == 0.0


class TestRootedPagerank:
    def test_single_edge_balance(self):
        # by hand: pi0 = 1/2 + pi1/2, pi1 = pi0/2 -> (2/3, 1/3)
        g = build_csr(2, [(0, 1)])
        pi = rooted_pagerank(g, 0, alpha=0.5, tol=1e-14)
        assert np.allclose(pi, [2 / 3, 1 / 3], atol=1e-12)

    def test_tiny_alpha_is_pure_restart(self):
        rng = np.random.default_rng(2)
        g = random_graph(rng, 8, p=0.4)
        pi = rooted_pagerank(g, 3, alpha=1e-8, tol=1e-15)
        e = np.zeros(8)
        e[3] = 1.0
        assert np.max(np.abs(pi - e)) < 1e-7

    def test_matches_dense_solver(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            n = int(rng.integers(2, 16))
            g = random_graph(rng, n, p=float(rng.uniform(0.1, 0.5)))
            root = int(rng.integers(n))
            alpha = float(rng.uniform(0.3, 0.95))
            pi = rooted_pagerank(g, root, alpha, tol=1e-13)
            assert np.max(np.abs(pi - ppr_dense_oracle(g, root, alpha))) < 1e-8

    def test_distribution_properties(self):
        rng = np.random.default_rng(4)
        g = random_graph(rng, 12, p=0.3)
        pi = rooted_pagerank(g, 0, alpha=0.85, tol=1e-12)
        assert np.all(pi >= 0)
        assert abs(pi.sum() - 1.0) < 1e-10

    def test_isolated_root_is_absorbing(self):
        g = build_csr(3, [(0, 1)])  # node 2 isolated
        pi = rooted_pagerank(g, 2, alpha=0.85, tol=1e-13)
        assert np.allclose(pi, [0, 0, 1], atol=1e-12)

    def test_non_convergence_raises(self):
        g = build_csr(2, [(0, 1)])
        with pytest.raises(NumericError, match="converge"):
            rooted_pagerank(g, 0, alpha=0.9, tol=1e-12, max_iter=2)

    def test_alpha_range_enforced(self):
        g = build_csr(2, [(0, 1)])
        with pytest.raises(ValueError, match="alpha"):
            rooted_pagerank(g, 0, alpha=1.0)

    def test_pair_score_symmetric(self):
        rng = np.random.default_rng(5)
        g = random_graph(rng, 10, p=0.3)
        for u, v in [(0, 5), (2, 9), (3, 4)]:
            assert rooted_pagerank_score(g, u, v) == pytest.approx(
                rooted_pagerank_score(g, v, u), abs=1e-12)


class TestSimrank:
    def test_self_similarity_is_one(self):
        rng = np.random.default_rng(6)
        g = random_graph(rng, 10, p=0.3)
        S = simrank(g, 0.8, 5)
        assert np.array_equal(np.diag(S), np.ones(10))

    def test_isolated_pair_stays_zero(self):
        g = build_csr(4, [(0, 1)])  # nodes 2, 3 isolated
        S = simrank(g, 0.8, 6)
        assert S[2, 3] == 0.0

    def test_matches_naive_double_loop(self):
        g = build_csr(4, [(0, 1), (1, 2), (2, 3)])
        S = simrank(g, 0.8, 5)
        assert np.max(np.abs(S - simrank_naive(g, 0.8, 5))) < 1e-10

    def test_naive_oracle_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            n = int(rng.integers(2, 12))
            g = random_graph(rng, n, p=0.4)
            S = simrank(g, 0.6, 4)
            assert np.max(np.abs(S - simrank_naive(g, 0.6, 4))) < 1e-10

    def test_values_in_unit_interval_and_symmetric(self):
        rng = np.random.default_rng(8)
        g = random_graph(rng, 12, p=0.3)
        S = simrank(g, 0.9, 6)
        assert S.min() >= 0.0 and S.max() <= 1.0
        assert np.allclose(S, S.T, atol=1e-14)

    def test_node_cap(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 12, p=0.3)
        with pytest.raises(DataError, match="capped"):
            simrank(g, 0.8, 2, max_nodes=10)


class TestDispatcher:
    def test_all_kinds_score_pairs(self):
        rng = np.random.default_rng(10)
        g = random_graph(rng, 12, p=0.3)
        pairs = [(0, 1), (2, 7), (3, 11)]
        for kind in ("cn", "aa", "ppr", "simrank"):
            scores = heuristic_scores(g, kind, pairs)
            assert scores.shape == (3,)
            swapped = heuristic_scores(g, kind, [(v, u) for u, v in pairs])
            assert np.allclose(scores, swapped, atol=1e-10)

    def test_ppr_dispatcher_matches_pair_score(self):
        rng = np.random.default_rng(11)
        g = random_graph(rng, 9, p=0.4)
        got = heuristic_scores(g, "ppr", [(1, 6)], alpha=0.7)[0]
        assert got == pytest.approx(
            rooted_pagerank_score(g, 1, 6, alpha=0.7), abs=1e-12)

    def test_unknown_kind(self):
        g = build_csr(2, [(0, 1)])
        with pytest.raises(ValueError, match="unknown heuristic"):
            heuristic_scores(g, "katz", [(0, 1)])
