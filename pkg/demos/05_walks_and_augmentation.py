"""Random walks, co-occurrence edges, and edge dropout.
========================================================

Augmentation adds training-time edges between nodes that co-occur often on
uniform random walks and removes a random fraction of existing edges. Both
are pure functions of the seed; evaluation never sees an augmented graph.
"""

import numpy as np

from hoplink import (augment_graph, build_csr, cooccurrence_augment,
                     edge_dropout, sample_walks)

# two triangles joined by one edge: walks stay inside their triangle most
# of the time, so triangle-internal non-edges co-occur heavily
graph = build_csr(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])

walks = sample_walks(graph, walk_length=8, walks_per_node=20, seed=0)
print(f"{len(walks.walks)} walks, first one:", walks.walks[0])

added = cooccurrence_augment(walks, window=3, tau=10)
print("co-occurrence candidates (non-edges seen >= 10 times):")
print(added)

view = edge_dropout(graph, p=0.3, seed=1)
print("\ndropped edges at p=0.3:", view.dropped_edges.tolist())
print("effective edge count:", view.to_graph().num_edges,
      "of", graph.num_edges)

combined = augment_graph(graph, walk_length=8, walks_per_node=20, window=3,
                         tau=10, dropout_p=0.3, seed=2)
effective = combined.to_graph()
print("\ncombined view: ", len(combined.added_edges), "added,",
      len(combined.dropped_edges), "dropped,",
      effective.num_edges, "effective edges")

again = augment_graph(graph, walk_length=8, walks_per_node=20, window=3,
                      tau=10, dropout_p=0.3, seed=2)
print("same seed reproduces the identical view:",
      np.array_equal(combined.added_edges, again.added_edges)
      and np.array_equal(combined.dropped_edges, again.dropped_edges))
