"""Link prediction with multi-branch graph diffusion.

Node representations come from parallel shallow diffusion branches: each
branch projects the input into its own feature space, propagates it a few
hops with a normalized transition operator, and mixes the hops with
learnable softmax weights. The branch outputs are concatenated and scored
by a small pairwise decoder trained with sampled negatives. Classical
heuristics (common neighbors, Adamic-Adar, rooted PageRank, SimRank) run
under the identical Hits@K / MRR / AUC evaluator as baselines.
"""

__version__ = "0.1.0"

from .augment import (AugmentedGraphView, WalkSet, augment_graph,
                      cooccurrence_augment, edge_dropout, sample_negatives,
                      sample_walks, write_walks)
from .config import (AugmentConfig, DataConfig, EvalConfig, ModelConfig,
                     RunConfig, TrainConfig, config_hash, load_config)
from .diffusion import (BranchConfig, branch_transitions, default_branches,
                        diffuse, diffuse_backward, hop_combine,
                        inception_forward, inception_states, softmax)
from .errors import ConfigError, DataError, HoplinkError, NumericError
from .graph import (DatasetSplits, SparseGraph, TransitionMatrix, build_csr,
                    build_transition, ingest_edge_list, load_features,
                    load_splits)
from .heuristics import (adamic_adar, common_neighbors, heuristic_scores,
                         rooted_pagerank, rooted_pagerank_score, simrank)
from .metrics import auc, hits_at_k, mrr
from .model import (Adam, LinkBatch, ModelParams, auc_loss, backward,
                    bce_loss, compose_input, init_params, load_checkpoint,
                    save_checkpoint, score_links)
from .synthetic import sbm_graph, two_clique_graph
from .training import (EvalReport, LinkDataset, TrainResult, aggregate_runs,
                       evaluate_params, evaluate_runs, evaluate_runs_on,
                       load_dataset, sample_nonedge_pairs, train, train_run)
