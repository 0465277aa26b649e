"""Training loop, test evaluation, and the repeated-seed protocol.

A run trains with Adam on negative-sampled links, logs train loss, tracks
validation Hits@K at a fixed cadence, and keeps the parameters of the best
validation epoch. ``evaluate_runs`` repeats the run once per seed and
aggregates test metrics as mean plus sample standard deviation.

Everything is a pure function of (dataset, config, seeds): all random streams
are derived from the run seed or from fixed protocol constants, so repeated
invocations produce byte-identical metrics.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .augment import _member, augment_graph, sample_negatives
from .config import RunConfig, config_hash
from .diffusion import branch_transitions, inception_states
from .errors import DataError, NumericError
from .graph import (DatasetSplits, SparseGraph, _pair_keys, build_csr,
                    load_features, load_splits)
from .metrics import auc, hits_at_k, mrr
from .model import (Adam, LinkBatch, ModelParams, backward, compose_input,
                    init_params, score_links)

# Fixed protocol seeds so sampled evaluation negatives are identical across
# runs and across repeated invocations.
_VALID_NEG_SEED = 7001
_TEST_NEG_SEED = 7002
_NONEDGE_ROUNDS = 1000


@dataclass
class LinkDataset:
    """A graph's split positives plus optional node features."""

    num_nodes: int
    splits: DatasetSplits
    features: np.ndarray | None = None


@dataclass
class TrainResult:
    params: ModelParams
    log: list
    best_epoch: int
    best_valid: float
    seed: int


def load_dataset(data_cfg) -> LinkDataset:
    if not data_cfg.splits_dir:
        raise DataError("config data.splits_dir is required for training")
    num_nodes = data_cfg.num_nodes or None
    splits = load_splits(data_cfg.splits_dir, num_nodes)
    if num_nodes is None:
        ids = [p.max() for p in (splits.train_edges, splits.valid_edges,
                                 splits.test_edges) if p.size]
        num_nodes = int(max(ids)) + 1
    features = None
    if data_cfg.features:
        features = load_features(data_cfg.features, num_nodes)
    return LinkDataset(num_nodes, splits, features)


def sample_nonedge_pairs(graph: SparseGraph, count: int, seed,
                         exclude_keys=None) -> np.ndarray:
    """Uniform non-edge (u, v) pairs, u != v, avoiding ``exclude_keys``."""
    n = graph.num_nodes
    if n < 2:
        raise DataError("cannot sample non-edges on a graph with < 2 nodes")
    arc_keys = graph.arcs()
    arc_keys = arc_keys[:, 0] * n + arc_keys[:, 1]
    excl = np.asarray(exclude_keys if exclude_keys is not None else [],
                      dtype=np.int64)
    excl = np.unique(excl)
    rng = np.random.default_rng(seed)
    out = np.zeros((count, 2), dtype=np.int64)
    filled = 0
    for _ in range(_NONEDGE_ROUNDS):
        if filled == count:
            break
        need = count - filled
        u = rng.integers(0, n, size=need)
        v = rng.integers(0, n, size=need)
        ok = u != v
        ok &= ~_member(u * n + v, arc_keys)
        ukeys = np.minimum(u, v) * n + np.maximum(u, v)
        if excl.size:
            ok &= ~_member(ukeys, excl)
        good = ok.sum()
        out[filled:filled + good, 0] = u[ok]
        out[filled:filled + good, 1] = v[ok]
        filled += good
    if filled < count:
        raise DataError(f"could not sample {count} non-edge pairs "
                        f"after {_NONEDGE_ROUNDS} rounds")
    return out


def _all_positive_keys(splits: DatasetSplits, n: int) -> np.ndarray:
    return np.concatenate([_pair_keys(splits.train_edges, n),
                           _pair_keys(splits.valid_edges, n),
                           _pair_keys(splits.test_edges, n)])


def _eval_negatives(dataset: LinkDataset, graph: SparseGraph, which: str,
                    num_negatives: int) -> np.ndarray:
    stored = (dataset.splits.valid_negatives if which == "valid"
              else dataset.splits.test_negatives)
    if stored is not None and stored.size:
        return stored
    seed = _VALID_NEG_SEED if which == "valid" else _TEST_NEG_SEED
    exclude = _all_positive_keys(dataset.splits, dataset.num_nodes)
    return sample_nonedge_pairs(graph, num_negatives, seed, exclude)


def _compose(dataset: LinkDataset, params: ModelParams, mode: str):
    if mode in ("features", "both") and dataset.features is None:
        raise DataError(f"model input mode {mode!r} requires a feature file")
    return compose_input(dataset.features, params, mode)


def train_run(dataset: LinkDataset, config: RunConfig, seed: int) -> TrainResult:
    """One seeded training run; returns the best-validation-epoch parameters."""
    cfg_t, cfg_m = config.train, config.model
    splits = dataset.splits
    if splits.train_edges.size == 0:
        raise DataError("training split is empty")
    graph = build_csr(dataset.num_nodes, splits.train_edges)
    base_transitions = branch_transitions(graph, cfg_m.branches)
    params = init_params(cfg_m, dataset.num_nodes, 0 if dataset.features is None
                         else dataset.features.shape[1], seed)
    param_dict = params.as_dict()
    adam = Adam(cfg_t.lr, cfg_t.beta1, cfg_t.beta2, cfg_t.eps)

    valid_pos = splits.valid_edges
    valid_neg = (_eval_negatives(dataset, graph, "valid",
                                 config.eval.num_negatives)
                 if valid_pos.size else None)
    primary_k = config.eval.hits_k[0]

    pos = splits.train_edges
    q = cfg_t.negatives_per_pos
    log = []
    best = TrainResult(params.copy(), log, 0, -1.0, seed)
    for epoch in range(1, cfg_t.epochs + 1):
        if config.augment.enabled:
            epoch_graph = augment_graph(
                graph,
                walk_length=config.augment.walk_length,
                walks_per_node=config.augment.walks_per_node,
                window=config.augment.window,
                tau=config.augment.tau,
                dropout_p=config.augment.edge_dropout,
                seed=[seed, 30, epoch]).to_graph()
            transitions = branch_transitions(epoch_graph, cfg_m.branches)
        else:
            epoch_graph, transitions = graph, base_transitions

        order = np.random.default_rng([seed, 10, epoch]).permutation(pos.shape[0])
        epoch_pos = pos[order]
        epoch_neg = sample_negatives(graph, epoch_pos, q, seed=[seed, 20, epoch])

        cached_forward = None
        losses = []
        for start in range(0, epoch_pos.shape[0], cfg_t.batch_size):
            stop = min(start + cfg_t.batch_size, epoch_pos.shape[0])
            batch = LinkBatch(epoch_pos[start:stop],
                              epoch_neg[start * q:stop * q])
            X = _compose(dataset, params, cfg_m.input)
            if cfg_t.refresh_reps == "epoch":
                if cached_forward is None:
                    cached_forward = inception_states(
                        epoch_graph, X, cfg_m.branches, params, transitions)
                forward = cached_forward
            else:
                forward = None
            loss, grads = backward(epoch_graph, X, cfg_m.branches, params,
                                   batch, transitions, cfg_t.loss, forward)
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch}, "
                                   f"step {len(losses) + 1}")
            adam.step(param_dict, grads)
            losses.append(loss)

        record = {"epoch": epoch, "loss": float(np.mean(losses))}
        if valid_neg is not None and \
                (epoch % cfg_t.eval_every == 0 or epoch == cfg_t.epochs):
            X = _compose(dataset, params, cfg_m.input)
            reps = inception_states(graph, X, cfg_m.branches, params,
                                    base_transitions)[0]
            vh = hits_at_k(score_links(reps, valid_pos, params),
                           score_links(reps, valid_neg, params), primary_k)
            record["valid_hits"] = vh
            if vh > best.best_valid:
                best = TrainResult(params.copy(), log, epoch, vh, seed)
        log.append(record)
    if best.best_valid < 0:  # no validation split: keep the final parameters
        best = TrainResult(params.copy(), log, cfg_t.epochs, float("nan"), seed)
    return best


def train(config: RunConfig, seed: int) -> TrainResult:
    """Load the configured dataset and run one seeded training run."""
    return train_run(load_dataset(config.data), config, seed)


def evaluate_params(dataset: LinkDataset, config: RunConfig,
                    params: ModelParams) -> dict:
    """Test metrics {hits@K..., mrr, auc} for a trained parameter set."""
    splits = dataset.splits
    if splits.test_edges.size == 0:
        raise DataError("test split is empty")
    edges = splits.train_edges
    if config.train.merge_valid_into_graph and splits.valid_edges.size:
        edges = np.vstack([edges, splits.valid_edges])
    graph = build_csr(dataset.num_nodes, edges)
    X = _compose(dataset, params, config.model.input)
    reps = inception_states(graph, X, config.model.branches, params,
                            branch_transitions(graph, config.model.branches))[0]
    pos = score_links(reps, splits.test_edges, params)
    neg = score_links(reps, _eval_negatives(dataset, graph, "test",
                                            config.eval.num_negatives), params)
    shared = np.broadcast_to(neg, (pos.size, neg.size))
    metrics = {"hits": {int(k): hits_at_k(pos, neg, k)
                        for k in config.eval.hits_k},
               "mrr": mrr(pos, shared),
               "auc": auc(pos, neg)}
    return metrics


@dataclass
class EvalReport:
    """Per-run test metrics plus mean and sample std across seeds.

    ``to_json`` is the canonical metrics serialization: fixed key order,
    per-run values first, aggregate mean/std/n per metric, measured runtime
    last. With ``include_runtime=False`` the runtime field is nulled, which
    is the byte-stable form used for determinism comparisons (wall time is
    the one field that cannot be a function of config and seeds).
    """

    config: dict
    seeds: list
    per_run: list
    aggregate: dict
    runtime_s: float

    @property
    def n(self) -> int:
        return len(self.per_run)

    def to_json(self, include_runtime: bool = True) -> str:
        payload = {
            "config_hash": config_hash(self.config),
            "per_run": self.per_run,
            "aggregate": self.aggregate,
            "runtime_s": self.runtime_s if include_runtime else None,
        }
        return json.dumps(payload, indent=2) + "\n"

    def write(self, path, include_runtime: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json(include_runtime))


def aggregate_runs(per_run: list, hits_k) -> dict:
    """mean/std/n per metric; std uses the n-1 denominator, 0 when n == 1."""
    names = [f"hits@{int(k)}" for k in hits_k] + ["mrr", "auc"]
    def values(name):
        if name.startswith("hits@"):
            k = name.split("@")[1]
            return np.array([r["hits"][k] for r in per_run])
        return np.array([r[name] for r in per_run])
    out = {}
    for name in names:
        vals = values(name)
        std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
        out[name] = {"mean": float(np.mean(vals)), "std": std,
                     "n": int(vals.size)}
    return out


def evaluate_runs_on(dataset: LinkDataset, config: RunConfig) -> EvalReport:
    """Train once per seed, evaluate on test, aggregate mean and sample std."""
    t0 = time.perf_counter()
    per_run = []
    for seed in config.seeds:
        result = train_run(dataset, config, seed)
        metrics = evaluate_params(dataset, config, result.params)
        per_run.append({
            "seed": int(seed),
            "hits": {str(k): metrics["hits"][int(k)]
                     for k in config.eval.hits_k},
            "mrr": metrics["mrr"],
            "auc": metrics["auc"],
        })
    aggregate = aggregate_runs(per_run, config.eval.hits_k)
    return EvalReport(config.to_dict(), list(config.seeds), per_run, aggregate,
                      time.perf_counter() - t0)


def evaluate_runs(config: RunConfig) -> EvalReport:
    return evaluate_runs_on(load_dataset(config.data), config)
