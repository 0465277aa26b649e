"""Build a CSR graph from an edge list and inspect its transition operators.
=============================================================================

The graph is stored once in compressed sparse row form; every diffusion
operator is a reweighting of the same structure plus one virtual self-loop
per node.
"""

import numpy as np

from hoplink import build_csr, build_transition

# a path 0-1-2-3 plus a dangling isolated node 4
graph = build_csr(5, [(0, 1), (1, 2), (2, 3)])
print("nodes:", graph.num_nodes)
print("row_offsets:", graph.row_offsets)
print("col_targets:", graph.col_targets)
print("degrees:", graph.degrees)
print("neighbors of 1:", graph.neighbors(1))

for kind in ("rw", "sym", "adj"):
    T = build_transition(graph, kind)
    print(f"\n{kind} transition:")
    print(np.round(T.to_dense(), 4))

# the random-walk kind is row-stochastic, even on the isolated node
T = build_transition(graph, "rw")
print("\nrw row sums:", T.row_sums())

# the symmetric kind equals its transpose entry for entry
S = build_transition(graph, "sym").to_dense()
print("sym exactly symmetric:", np.array_equal(S, S.T))
