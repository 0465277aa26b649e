"""Run configuration: TOML file loading, validation, overrides, hashing.

The config file is the single source of truth for an experiment; every field
shown in ``RunConfig`` is addressable from the file and from ``--set``
command-line overrides (``section.key=value``). Unknown keys are rejected so
typos fail loudly.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diffusion import BranchConfig, default_branches
from .errors import ConfigError


@dataclass
class DataConfig:
    splits_dir: str = ""
    edges: str = ""
    features: str = ""
    num_nodes: int = 0  # 0 = infer from the split files


@dataclass
class ModelConfig:
    input: str = "embeddings"      # features | embeddings | both
    embed_dim: int = 256
    hidden_dim: int = 256
    hop_weights: str = "scalar"    # scalar | channel
    branches: list = field(default_factory=default_branches)


@dataclass
class TrainConfig:
    loss: str = "bce"              # bce | auc
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 200
    batch_size: int = 512
    eval_every: int = 10
    negatives_per_pos: int = 1
    refresh_reps: str = "step"     # step (exact) | epoch (stale, approximate)
    merge_valid_into_graph: bool = False


@dataclass
class EvalConfig:
    hits_k: list = field(default_factory=lambda: [50])
    num_negatives: int = 1000      # sampled when the split has no *_neg.tsv


@dataclass
class AugmentConfig:
    enabled: bool = False
    walk_length: int = 10
    walks_per_node: int = 5
    window: int = 3
    tau: int = 3
    edge_dropout: float = 0.05


@dataclass
class RunConfig:
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    seeds: list = field(default_factory=lambda: list(range(10)))

    def to_dict(self) -> dict:
        return {
            "data": vars(self.data).copy(),
            "model": {**{k: v for k, v in vars(self.model).items()
                         if k != "branches"},
                      "branches": [vars(b).copy() for b in self.model.branches]},
            "train": vars(self.train).copy(),
            "eval": {"hits_k": list(self.eval.hits_k),
                     "num_negatives": self.eval.num_negatives},
            "augment": vars(self.augment).copy(),
            "seeds": list(self.seeds),
        }


_SECTIONS = ("data", "model", "train", "eval", "augment")


def _fill(obj, section: str, values: dict):
    for key, value in values.items():
        if not hasattr(obj, key):
            raise ConfigError(f"unknown config key '{section}.{key}'")
        current = getattr(obj, key)
        if isinstance(current, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"'{section}.{key}' must be a boolean")
        elif isinstance(current, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"'{section}.{key}' must be an integer")
        elif isinstance(current, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{section}.{key}' must be a number")
            value = float(value)
        elif isinstance(current, str):
            if not isinstance(value, str):
                raise ConfigError(f"'{section}.{key}' must be a string")
        elif isinstance(current, list):
            if not isinstance(value, list):
                raise ConfigError(f"'{section}.{key}' must be a list")
        setattr(obj, key, value)


def config_from_dict(raw: dict) -> RunConfig:
    raw = dict(raw)
    cfg = RunConfig()
    for section in _SECTIONS:
        values = raw.pop(section, {})
        if not isinstance(values, dict):
            raise ConfigError(f"config section '{section}' must be a table")
        if section == "model" and "branches" in values:
            values = dict(values)
            branches = values.pop("branches")
            cfg.model.branches = _parse_branches(branches)
        _fill(getattr(cfg, section), section, values)
    if "seeds" in raw:
        cfg.seeds = raw.pop("seeds")
    if raw:
        raise ConfigError(f"unknown config key '{next(iter(raw))}'")
    validate_config(cfg)
    return cfg


def _parse_branches(branches) -> list:
    if not isinstance(branches, list) or not branches:
        raise ConfigError("'model.branches' must be a non-empty array of tables")
    out = []
    for i, entry in enumerate(branches):
        if not isinstance(entry, dict):
            raise ConfigError("'model.branches' entries must be tables")
        unknown = set(entry) - {"kind", "depth", "out_dim"}
        if unknown:
            raise ConfigError(f"unknown branch key '{unknown.pop()}'")
        try:
            out.append(BranchConfig(entry.get("kind", "sym"),
                                    int(entry.get("depth", 2)),
                                    int(entry.get("out_dim", 64))))
        except ValueError as exc:
            raise ConfigError(f"branch {i}: {exc}") from None
    return out


def validate_config(cfg: RunConfig) -> None:
    m, t, e, a = cfg.model, cfg.train, cfg.eval, cfg.augment
    def bad(msg):
        raise ConfigError(msg)
    if m.input not in ("features", "embeddings", "both"):
        bad(f"invalid model.input {m.input!r}")
    if m.hop_weights not in ("scalar", "channel"):
        bad(f"invalid model.hop_weights {m.hop_weights!r}")
    if m.embed_dim < 1 or m.hidden_dim < 1:
        bad("model dims must be >= 1")
    if not m.branches:
        bad("at least one branch is required")
    if t.loss not in ("bce", "auc"):
        bad(f"invalid train.loss {t.loss!r}")
    if t.refresh_reps not in ("step", "epoch"):
        bad(f"invalid train.refresh_reps {t.refresh_reps!r}")
    if t.lr < 0:
        bad("train.lr must be >= 0")
    if not (0 <= t.beta1 < 1 and 0 <= t.beta2 < 1):
        bad("Adam betas must lie in [0, 1)")
    if t.eps <= 0:
        bad("train.eps must be > 0")
    if t.epochs < 1:
        bad("train.epochs must be >= 1")
    if t.batch_size < 1:
        bad("train.batch_size must be >= 1")
    if t.eval_every < 1:
        bad("train.eval_every must be >= 1")
    if t.negatives_per_pos < 1:
        bad("train.negatives_per_pos must be >= 1")
    if not cfg.seeds or not all(isinstance(s, int) and not isinstance(s, bool)
                                and s >= 0 for s in cfg.seeds):
        bad("seeds must be a non-empty list of non-negative integers")
    if not e.hits_k or not all(isinstance(k, int) and k >= 1
                               for k in e.hits_k):
        bad("eval.hits_k must be a non-empty list of integers >= 1")
    if e.num_negatives < 1:
        bad("eval.num_negatives must be >= 1")
    if not (0 <= a.edge_dropout < 1):
        bad("augment.edge_dropout must satisfy 0 <= p < 1")
    if a.walk_length < 1 or a.walks_per_node < 1 or a.window < 1 or a.tau < 1:
        bad("augment counts must be >= 1")


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``section.key=value`` strings on top of a raw config dict."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        dotted, text = item.split("=", 1)
        keys = dotted.strip().split(".")
        if not all(keys):
            raise ConfigError(f"override {item!r} has an empty key component")
        try:
            value = tomllib.loads(f"v = {text.strip()}")["v"]
        except tomllib.TOMLDecodeError:
            value = text.strip()
        node = raw
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} descends into a scalar")
        node[keys[-1]] = value
    return raw


def load_config(path, overrides=()) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(apply_overrides(raw, overrides))


def config_hash(config: dict | RunConfig) -> str:
    """Stable 16-hex-digit digest of a fully resolved configuration."""
    if isinstance(config, RunConfig):
        config = config.to_dict()
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
