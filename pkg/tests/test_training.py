import json

import numpy as np
import pytest

from hoplink import (DataError, LinkDataset, NumericError, RunConfig,
                     aggregate_runs, auc, build_csr, compose_input,
                     default_branches, evaluate_params, evaluate_runs_on,
                     inception_forward, init_params, sample_nonedge_pairs,
                     score_links, train_run, two_clique_graph)


def desk_config(epochs=60, seeds=(0,)):
    cfg = RunConfig()
    cfg.model.embed_dim = 16
    cfg.model.hidden_dim = 16
    cfg.model.branches = default_branches(8)
    cfg.train.epochs = epochs
    cfg.train.eval_every = 10
    cfg.train.batch_size = 256
    cfg.eval.hits_k = [10]
    cfg.eval.num_negatives = 200
    cfg.seeds = list(seeds)
    return cfg


@pytest.fixture(scope="module")
def clique_dataset():
    n, splits = two_clique_graph(20, 0.10, 0.05, seed=0)
    return LinkDataset(n, splits)


class TestTrainRun:
    def test_zero_lr_keeps_initial_params(self, clique_dataset):
        cfg = desk_config(epochs=1)
        cfg.train.lr = 0.0
        result = train_run(clique_dataset, cfg, seed=3)
        fresh = init_params(cfg.model, clique_dataset.num_nodes, 0, seed=3)
        for (ka, va), (kb, vb) in zip(result.params.as_dict().items(),
                                      fresh.as_dict().items()):
            assert ka == kb and np.array_equal(va, vb)

    def test_loss_decreases(self, clique_dataset):
        result = train_run(clique_dataset, desk_config(epochs=30), seed=0)
        assert result.log[-1]["loss"] < result.log[0]["loss"]

    def test_deterministic_logs(self, clique_dataset):
        cfg = desk_config(epochs=15)
        a = train_run(clique_dataset, cfg, seed=1)
        b = train_run(clique_dataset, cfg, seed=1)
        assert a.log == b.log
        assert all(np.array_equal(x, y) for x, y in
                   zip(a.params.as_dict().values(),
                       b.params.as_dict().values()))

    def test_planted_cliques_reach_high_validation_auc(self, clique_dataset):
        cfg = desk_config(epochs=200)
        result = train_run(clique_dataset, cfg, seed=0)
        graph = build_csr(clique_dataset.num_nodes,
                          clique_dataset.splits.train_edges)
        X = compose_input(None, result.params, "embeddings")
        reps = inception_forward(graph, X, cfg.model.branches, result.params)
        neg = sample_nonedge_pairs(graph, 200, 7001)
        score = auc(score_links(reps, clique_dataset.splits.valid_edges,
                                result.params),
                    score_links(reps, neg, result.params))
        assert score > 0.9

    def test_empty_train_split_rejected(self, clique_dataset):
        empty = LinkDataset(4, type(clique_dataset.splits)(
            np.zeros((0, 2), dtype=np.int64),
            np.array([[0, 1]]), np.array([[1, 2]])))
        with pytest.raises(DataError, match="empty"):
            train_run(empty, desk_config(), seed=0)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_exploding_lr_reports_numeric_failure(self, clique_dataset):
        cfg = desk_config(epochs=5)
        cfg.train.lr = 1e200
        with pytest.raises(NumericError, match="epoch"):
            train_run(clique_dataset, cfg, seed=0)

    def test_stale_reps_mode_still_learns(self, clique_dataset):
        cfg = desk_config(epochs=30)
        cfg.train.refresh_reps = "epoch"
        result = train_run(clique_dataset, cfg, seed=0)
        assert result.log[-1]["loss"] < result.log[0]["loss"]

    def test_augmented_training_runs(self, clique_dataset):
        cfg = desk_config(epochs=5)
        cfg.augment.enabled = True
        cfg.augment.edge_dropout = 0.1
        cfg.augment.walk_length = 4
        cfg.augment.walks_per_node = 2
        result = train_run(clique_dataset, cfg, seed=0)
        assert len(result.log) == 5

    def test_validation_is_free_of_augmentation(self, clique_dataset):
        # the logged validation metric must come from the base graph, so an
        # all-dropout config still evaluates the same fixed positives
        cfg = desk_config(epochs=10)
        cfg.augment.enabled = True
        cfg.augment.edge_dropout = 0.9
        result = train_run(clique_dataset, cfg, seed=0)
        assert "valid_hits" in result.log[-1]


class TestEvaluateRuns:
    def test_hand_computed_aggregate(self):
        per_run = [{"seed": 0, "hits": {"10": 0.5}, "mrr": 0.5, "auc": 0.5},
                   {"seed": 1, "hits": {"10": 0.7}, "mrr": 0.7, "auc": 0.7}]
        agg = aggregate_runs(per_run, [10])
        # sample std of {0.5, 0.7} = 0.1 * sqrt(2)
        assert agg["hits@10"]["mean"] == pytest.approx(0.6, abs=1e-15)
        assert agg["hits@10"]["std"] == pytest.approx(0.1414213562373095,
                                                      abs=1e-15)
        assert agg["auc"]["n"] == 2

    def test_single_seed_flagged(self, clique_dataset):
        report = evaluate_runs_on(clique_dataset, desk_config(epochs=5))
        for agg in report.aggregate.values():
            assert agg["std"] == 0.0 and agg["n"] == 1

    def test_aggregate_recomputable_from_per_run(self, clique_dataset):
        cfg = desk_config(epochs=10, seeds=(0, 1, 2))
        report = evaluate_runs_on(clique_dataset, cfg)
        assert report.n == 3
        again = aggregate_runs(report.per_run, cfg.eval.hits_k)
        for name, agg in report.aggregate.items():
            assert abs(agg["mean"] - again[name]["mean"]) < 1e-12
            assert abs(agg["std"] - again[name]["std"]) < 1e-12

    def test_metrics_json_is_byte_identical(self, clique_dataset):
        cfg = desk_config(epochs=10, seeds=(0, 1))
        a = evaluate_runs_on(clique_dataset, cfg)
        b = evaluate_runs_on(clique_dataset, cfg)
        assert a.to_json(include_runtime=False) == \
            b.to_json(include_runtime=False)
        pa, pb = json.loads(a.to_json()), json.loads(b.to_json())
        assert pa["runtime_s"] > 0
        del pa["runtime_s"], pb["runtime_s"]
        assert pa == pb

    def test_json_layout(self, clique_dataset):
        report = evaluate_runs_on(clique_dataset, desk_config(epochs=5))
        payload = json.loads(report.to_json())
        assert list(payload) == ["config_hash", "per_run", "aggregate",
                                 "runtime_s"]
        assert list(payload["per_run"][0]) == ["seed", "hits", "mrr", "auc"]
        assert set(payload["aggregate"]) == {"hits@10", "mrr", "auc"}
        for agg in payload["aggregate"].values():
            assert 0.0 <= agg["mean"] <= 1.0

    def test_all_metrics_within_unit_interval(self, clique_dataset):
        report = evaluate_runs_on(clique_dataset, desk_config(epochs=10))
        for run in report.per_run:
            for v in list(run["hits"].values()) + [run["mrr"], run["auc"]]:
                assert 0.0 <= v <= 1.0


class TestEvaluateParams:
    def test_merge_valid_changes_eval_graph(self, clique_dataset):
        # untrained params keep scores interior, so the graph change shows
        cfg = desk_config(epochs=1)
        cfg.train.lr = 0.0
        result = train_run(clique_dataset, cfg, seed=0)
        plain = evaluate_params(clique_dataset, cfg, result.params)
        cfg.train.merge_valid_into_graph = True
        merged = evaluate_params(clique_dataset, cfg, result.params)
        assert set(plain) == set(merged) == {"hits", "mrr", "auc"}
        # valid edges join the diffusion graph, shifting every raw score
        assert merged["auc"] != plain["auc"]

    def test_stored_negatives_are_used(self, clique_dataset):
        cfg = desk_config(epochs=5)
        result = train_run(clique_dataset, cfg, seed=0)
        splits = clique_dataset.splits
        fixed = LinkDataset(
            clique_dataset.num_nodes,
            type(splits)(splits.train_edges, splits.valid_edges,
                         splits.test_edges,
                         test_negatives=np.array([[0, 39], [5, 30]])))
        metrics = evaluate_params(fixed, cfg, result.params)
        assert 0.0 <= metrics["auc"] <= 1.0
