"""Classical heuristics and the trained model under one evaluator.
===================================================================

Common neighbors and Adamic-Adar only see two-hop structure; rooted
PageRank and SimRank are higher-order and are strong on small block-model
graphs. The trained diffusion model has to beat common neighbors under the
identical AUC evaluator (the acceptance bar); this script reproduces that
comparison at a reduced size so everything finishes in a few seconds.
"""

from hoplink import (BranchConfig, LinkDataset, RunConfig, auc, build_csr,
                     evaluate_params, heuristic_scores, sample_nonedge_pairs,
                     sbm_graph, train_run)
from hoplink.training import _all_positive_keys

num_nodes, splits = sbm_graph(400, 4, p_in=0.06, p_out=0.003,
                              valid_frac=0.05, test_frac=0.10, seed=1)
dataset = LinkDataset(num_nodes, splits)
graph = build_csr(num_nodes, splits.train_edges)
print(f"SBM: {num_nodes} nodes, {graph.num_edges} train edges, "
      f"{len(splits.test_edges)} test edges")

negatives = sample_nonedge_pairs(graph, 1000, 7002,
                                 _all_positive_keys(splits, num_nodes))

print("\nheuristic AUC on the identical test pairs:")
for kind in ("cn", "aa", "ppr", "simrank"):
    score = auc(heuristic_scores(graph, kind, splits.test_edges),
                heuristic_scores(graph, kind, negatives))
    print(f"  {kind:8s} {score:.4f}")

cfg = RunConfig()
cfg.model.embed_dim = 32
cfg.model.hidden_dim = 32
cfg.model.branches = [BranchConfig("sym", 3, 16), BranchConfig("sym", 5, 16),
                      BranchConfig("rw", 8, 16)]
cfg.train.loss = "auc"
cfg.train.lr = 0.05
cfg.train.epochs = 200
cfg.train.eval_every = 5
cfg.train.batch_size = 8192
cfg.eval.hits_k = [500]
cfg.eval.num_negatives = 1000
cfg.seeds = [0]

result = train_run(dataset, cfg, seed=0)
metrics = evaluate_params(dataset, cfg, result.params)
print(f"\ndiffusion model AUC: {metrics['auc']:.4f} "
      f"(best epoch {result.best_epoch})")
print(f"hits@500: {metrics['hits'][500]:.4f}, mrr: {metrics['mrr']:.4f}")
