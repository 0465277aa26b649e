"""The repeated-seed evaluation protocol and its metrics file.
===============================================================

One training run per seed, test metrics per run, then mean and sample
standard deviation per metric. The emitted JSON is byte-stable: rerunning
with the same config and seeds reproduces it exactly (wall-clock runtime is
the one field excluded from that guarantee).
"""

from hoplink import (LinkDataset, RunConfig, default_branches,
                     evaluate_runs_on, two_clique_graph)

num_nodes, splits = two_clique_graph(20, valid_frac=0.10, test_frac=0.05,
                                     seed=0)
dataset = LinkDataset(num_nodes, splits)

cfg = RunConfig()
cfg.model.embed_dim = 16
cfg.model.hidden_dim = 16
cfg.model.branches = default_branches(8)
cfg.train.epochs = 60
cfg.train.eval_every = 20
cfg.eval.hits_k = [10, 50]
cfg.eval.num_negatives = 200
cfg.seeds = [0, 1, 2, 3, 4]

report = evaluate_runs_on(dataset, cfg)
print(report.to_json())

again = evaluate_runs_on(dataset, cfg)
print("byte-identical on rerun:",
      report.to_json(include_runtime=False)
      == again.to_json(include_runtime=False))
