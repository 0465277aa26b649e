"""Command-line entry points: train, eval, heuristic, walks, version.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .augment import sample_walks, write_walks
from .config import load_config
from .errors import ConfigError, DataError, NumericError
from .graph import _pair_keys, _read_pairs, build_csr, ingest_edge_list
from .heuristics import HEURISTIC_KINDS, heuristic_scores
from .metrics import auc, hits_at_k
from .model import save_checkpoint
from .training import (EvalReport, aggregate_runs, evaluate_params,
                       evaluate_runs_on, load_dataset, sample_nonedge_pairs,
                       train_run)

_HEURISTIC_NEG_SEED = 7003


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoplink",
        description="Link prediction with multi-branch graph diffusion.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    train_p = sub.add_parser("train", help="train one seeded model")
    train_p.add_argument("--config", required=True, help="TOML config file")
    train_p.add_argument("--seed", type=int, help="override the run seed")
    train_p.add_argument("--out", default="model.ckpt",
                         help="checkpoint output path")
    train_p.add_argument("--metrics", default="metrics.json",
                         help="metrics JSON output path")
    train_p.add_argument("--set", action="append", default=[],
                         dest="overrides", metavar="KEY=VALUE",
                         help="config override, e.g. train.lr=0.05")
    train_p.set_defaults(func=_cmd_train)

    eval_p = sub.add_parser("eval", help="run the full multi-seed protocol")
    eval_p.add_argument("--config", required=True)
    eval_p.add_argument("--metrics", default="metrics.json")
    eval_p.add_argument("--set", action="append", default=[],
                        dest="overrides", metavar="KEY=VALUE")
    eval_p.set_defaults(func=_cmd_eval)

    heur_p = sub.add_parser("heuristic",
                            help="score pairs with a classical heuristic")
    heur_p.add_argument("--kind", required=True, choices=HEURISTIC_KINDS)
    heur_p.add_argument("--edges", help="edge list file "
                        "(or data.edges from --config)")
    heur_p.add_argument("--config", help="TOML config supplying data.edges")
    heur_p.add_argument("--pairs", required=True,
                        help="positive pairs to score")
    heur_p.add_argument("--neg", help="negative pairs file (sampled if absent)")
    heur_p.add_argument("--num-negatives", type=int, default=1000)
    heur_p.add_argument("--k", type=int, nargs="+", default=[50],
                        help="Hits@K cutoffs")
    heur_p.add_argument("--alpha", type=float, default=0.85,
                        help="rooted PageRank continuation probability")
    heur_p.add_argument("--c", type=float, default=0.8, help="SimRank decay")
    heur_p.add_argument("--iters", type=int, default=5, help="SimRank sweeps")
    heur_p.add_argument("--out", help="write per-pair scores to this TSV")
    heur_p.set_defaults(func=_cmd_heuristic)

    walks_p = sub.add_parser("walks", help="sample uniform random walks")
    walks_p.add_argument("--edges", help="edge list file "
                         "(or data.edges from --config)")
    walks_p.add_argument("--config", help="TOML config supplying data.edges")
    walks_p.add_argument("--length", type=int, default=10)
    walks_p.add_argument("--per-node", type=int, default=5)
    walks_p.add_argument("--seed", type=int, default=0)
    walks_p.add_argument("--dump-walks", metavar="PATH",
                         help="write one space-separated walk per line")
    walks_p.set_defaults(func=_cmd_walks)

    version_p = sub.add_parser("version", help="print the package version")
    version_p.set_defaults(func=lambda args: print(__version__) or 0)
    return parser


def _cmd_train(args) -> int:
    cfg = load_config(args.config, args.overrides)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        cfg.seeds = [args.seed]
    seed = cfg.seeds[0]
    dataset = load_dataset(cfg.data)
    t0 = time.perf_counter()
    result = train_run(dataset, cfg, seed)
    metrics = evaluate_params(dataset, cfg, result.params)
    per_run = [{"seed": seed,
                "hits": {str(k): metrics["hits"][int(k)]
                         for k in cfg.eval.hits_k},
                "mrr": metrics["mrr"], "auc": metrics["auc"]}]
    report = EvalReport(cfg.to_dict(), [seed], per_run,
                        aggregate_runs(per_run, cfg.eval.hits_k),
                        time.perf_counter() - t0)
    rng_state = {"scheme": "per-epoch derived streams", "seed": seed,
                 "epochs_completed": cfg.train.epochs}
    save_checkpoint(args.out, result.params, cfg.to_dict(), rng_state)
    report.write(args.metrics)
    print(f"checkpoint written to {args.out}")
    print(f"metrics written to {args.metrics}")
    print(f"best validation epoch {result.best_epoch} "
          f"(hits@{cfg.eval.hits_k[0]}={result.best_valid:.4f})")
    for name, agg in report.aggregate.items():
        print(f"test {name}: {agg['mean']:.4f}")
    return 0


def _cmd_eval(args) -> int:
    cfg = load_config(args.config, args.overrides)
    report = evaluate_runs_on(load_dataset(cfg.data), cfg)
    report.write(args.metrics)
    print(f"metrics written to {args.metrics} "
          f"({report.n} run{'s' if report.n != 1 else ''})")
    for name, agg in report.aggregate.items():
        flag = " [n=1]" if agg["n"] == 1 else ""
        print(f"{name}: {agg['mean']:.4f} +- {agg['std']:.4f}{flag}")
    return 0


def _edges_path(args) -> str:
    if args.edges:
        return args.edges
    if args.config:
        path = load_config(args.config).data.edges
        if path:
            return path
    raise ConfigError("an edge list is required: pass --edges or a --config "
                      "with data.edges set")


def _cmd_heuristic(args) -> int:
    num_nodes, edges = ingest_edge_list(_edges_path(args))
    graph = build_csr(num_nodes, edges)
    pairs = _read_pairs(args.pairs, num_nodes, what="pair")
    if pairs.size == 0:
        raise DataError(f"{args.pairs}: no pairs to score")
    kwargs = {"alpha": args.alpha, "c": args.c, "iters": args.iters}
    pos_scores = heuristic_scores(graph, args.kind, pairs, **kwargs)
    if args.neg:
        neg_pairs = _read_pairs(args.neg, num_nodes, what="negative pair")
    else:
        neg_pairs = sample_nonedge_pairs(
            graph, args.num_negatives, _HEURISTIC_NEG_SEED,
            _pair_keys(pairs, num_nodes))
    neg_scores = heuristic_scores(graph, args.kind, neg_pairs, **kwargs)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for (u, v), s in zip(pairs, pos_scores):
                fh.write(f"{u}\t{v}\t{s!r}\n")
    report = {"kind": args.kind,
              "pairs": int(pairs.shape[0]),
              "negatives": int(neg_pairs.shape[0]),
              "hits": {str(k): hits_at_k(pos_scores, neg_scores, k)
                       for k in args.k},
              "auc": auc(pos_scores, neg_scores)}
    print(json.dumps(report, indent=2))
    return 0


def _cmd_walks(args) -> int:
    num_nodes, edges = ingest_edge_list(_edges_path(args))
    graph = build_csr(num_nodes, edges)
    walks = sample_walks(graph, args.length, args.per_node, args.seed)
    lengths = np.array([len(w) for w in walks.walks])
    if args.dump_walks:
        write_walks(walks, args.dump_walks)
        print(f"walks written to {args.dump_walks}")
    print(f"{len(walks.walks)} walks over {num_nodes} nodes, "
          f"mean length {lengths.mean():.2f}")
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(cli_main())
