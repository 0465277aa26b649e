"""Trainable parameters, link scoring, losses, exact gradients, and Adam.

The link decoder scores a pair as MLP(z_u * z_v): elementwise product of the
two node representations, one ReLU hidden layer, scalar output with no final
nonlinearity. Scores are symmetric in (u, v) by construction.

Gradients are computed by hand-written reverse mode through the decoder, the
hop-weight softmax, and the diffusion recurrence (via ``diffuse_backward``);
there is no autodiff anywhere in this package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diffusion import _weights3, diffuse_backward, inception_states
from .errors import NumericError


@dataclass
class LinkBatch:
    """Positive pairs plus Q sampled negatives per positive."""

    pos_pairs: np.ndarray
    neg_pairs: np.ndarray

    def __post_init__(self):
        self.pos_pairs = np.asarray(self.pos_pairs, dtype=np.int64).reshape(-1, 2)
        self.neg_pairs = np.asarray(self.neg_pairs, dtype=np.int64).reshape(-1, 2)
        if self.pos_pairs.shape[0] and \
                self.neg_pairs.shape[0] % self.pos_pairs.shape[0]:
            raise ValueError("negative count must be a multiple of the "
                             "positive count")


@dataclass
class ModelParams:
    """All trainable tensors.

    ``projections[b]`` and ``hop_logits[b]`` belong to branch b; ``w1/b1``
    and ``w2/b2`` are the two decoder layers; ``embeddings`` is the free
    node embedding table, present only when the input uses embeddings.
    """

    projections: list = field(default_factory=list)
    hop_logits: list = field(default_factory=list)
    w1: np.ndarray = None
    b1: np.ndarray = None
    w2: np.ndarray = None
    b2: np.ndarray = None
    embeddings: np.ndarray | None = None

    def as_dict(self) -> dict:
        """Live views of every tensor, in the declared (checkpoint) order."""
        out = {}
        for b, W in enumerate(self.projections):
            out[f"proj{b}"] = W
        for b, t in enumerate(self.hop_logits):
            out[f"logits{b}"] = t
        out["w1"], out["b1"] = self.w1, self.b1
        out["w2"], out["b2"] = self.w2, self.b2
        if self.embeddings is not None:
            out["embed"] = self.embeddings
        return out

    def copy(self) -> "ModelParams":
        return ModelParams(
            [W.copy() for W in self.projections],
            [t.copy() for t in self.hop_logits],
            self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy(),
            None if self.embeddings is None else self.embeddings.copy())


def _glorot(rng, fan_in: int, fan_out: int, shape) -> np.ndarray:
    a = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=shape)


def init_params(model_cfg, num_nodes: int, feature_dim: int,
                seed) -> ModelParams:
    """Seed-deterministic initialization.

    Projections and decoder weights draw uniform(-a, a) with
    a = sqrt(6 / (fan_in + fan_out)); hop logits start at zero (uniform hop
    weighting); biases start at zero; embeddings draw normal(0, 1/sqrt(d)).
    """
    rng = np.random.default_rng(seed)
    if model_cfg.input == "features":
        d_in = feature_dim
    elif model_cfg.input == "embeddings":
        d_in = model_cfg.embed_dim
    else:
        d_in = feature_dim + model_cfg.embed_dim
    if d_in < 1:
        raise ValueError("model input width must be >= 1 "
                         "(missing features or zero embed_dim?)")
    projections = []
    hop_logits = []
    for br in model_cfg.branches:
        projections.append(_glorot(rng, d_in, br.out_dim, (d_in, br.out_dim)))
        if model_cfg.hop_weights == "channel":
            hop_logits.append(np.zeros((br.depth + 1, br.out_dim)))
        else:
            hop_logits.append(np.zeros(br.depth + 1))
    concat_dim = sum(br.out_dim for br in model_cfg.branches)
    hidden = model_cfg.hidden_dim
    w1 = _glorot(rng, concat_dim, hidden, (concat_dim, hidden))
    b1 = np.zeros(hidden)
    w2 = _glorot(rng, hidden, 1, (hidden,))
    b2 = np.zeros(1)
    embeddings = None
    if model_cfg.input in ("embeddings", "both"):
        embeddings = rng.normal(0.0, 1.0 / np.sqrt(model_cfg.embed_dim),
                                size=(num_nodes, model_cfg.embed_dim))
    return ModelParams(projections, hop_logits, w1, b1, w2, b2, embeddings)


def compose_input(features: np.ndarray | None, params: ModelParams,
                  mode: str) -> np.ndarray:
    """Assemble the model input X; embedding columns always come last."""
    if mode == "features":
        if features is None:
            raise ValueError("input mode 'features' requires a feature matrix")
        return np.asarray(features, dtype=np.float64)
    if mode == "embeddings":
        return params.embeddings
    if mode == "both":
        if features is None:
            raise ValueError("input mode 'both' requires a feature matrix")
        return np.hstack([features, params.embeddings])
    raise ValueError(f"unknown input mode {mode!r}")


def score_links(reps: np.ndarray, pairs, params: ModelParams) -> np.ndarray:
    """Decoder scores for each (u, v) pair; symmetric in u and v."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= reps.shape[0]:
            raise ValueError("pair endpoint out of range")
    e = reps[pairs[:, 0]] * reps[pairs[:, 1]]
    a = np.maximum(e @ params.w1 + params.b1, 0.0)
    return a @ params.w2 + params.b2[0]


def softplus(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def sigmoid(x: np.ndarray) -> np.ndarray:
    return np.exp(-softplus(-np.asarray(x, dtype=np.float64)))


def bce_loss(pos_scores, neg_scores) -> float:
    """mean softplus(-s+) + mean softplus(s-); empty sides contribute 0."""
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 and neg.size == 0:
        raise ValueError("bce_loss needs at least one score")
    loss = 0.0
    if pos.size:
        loss += float(softplus(-pos).mean())
    if neg.size:
        loss += float(softplus(neg).mean())
    return loss


def _bce_grad(pos: np.ndarray, neg: np.ndarray):
    gpos = -sigmoid(-pos) / pos.size if pos.size else np.zeros(0)
    gneg = sigmoid(neg) / neg.size if neg.size else np.zeros(0)
    return gpos, gneg


def auc_loss(pos_scores, neg_scores) -> float:
    """Pairwise squared margin loss mean((1 - s+ + s-)^2) over paired negatives.

    Negatives are paired with their positive in blocks of Q = |neg| / |pos|.
    """
    pos = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0 or neg.size % pos.size:
        raise ValueError("auc loss needs Q paired negatives per positive")
    diff = 1.0 - pos[:, None] + neg.reshape(pos.size, -1)
    return float(np.mean(diff * diff))


def _auc_grad(pos: np.ndarray, neg: np.ndarray):
    diff = 1.0 - pos[:, None] + neg.reshape(pos.size, -1)
    scale = 2.0 / diff.size
    return -scale * diff.sum(axis=1), scale * diff.ravel()


def loss_and_score_grads(pos: np.ndarray, neg: np.ndarray, kind: str):
    if kind == "bce":
        return bce_loss(pos, neg), _bce_grad(pos, neg)
    if kind == "auc":
        return auc_loss(pos, neg), _auc_grad(pos, neg)
    raise ValueError(f"unknown loss kind {kind!r}")


def backward(graph, X, branches, params: ModelParams, batch: LinkBatch,
             transitions=None, loss: str = "bce", forward=None):
    """Loss value and exact gradients for every parameter tensor.

    Returns ``(loss, grads)`` where ``grads`` mirrors ``params.as_dict()``.
    ``forward`` may carry a cached ``(Z, states)`` pair from
    ``inception_states`` (stale-representation training); by default the
    forward pass is recomputed here so gradients are exact.
    """
    if forward is None:
        Z, states = inception_states(graph, X, branches, params, transitions)
    else:
        Z, states = forward
    pairs = np.vstack([batch.pos_pairs, batch.neg_pairs])
    n_pos = batch.pos_pairs.shape[0]
    u, v = pairs[:, 0], pairs[:, 1]
    E = Z[u] * Z[v]
    H1 = E @ params.w1 + params.b1
    A = np.maximum(H1, 0.0)
    s = A @ params.w2 + params.b2[0]
    loss_val, (gpos, gneg) = loss_and_score_grads(s[:n_pos], s[n_pos:], loss)
    gs = np.concatenate([gpos, gneg])

    grads = {}
    gw2 = A.T @ gs
    gb2 = np.array([gs.sum()])
    gh = (gs[:, None] * params.w2[None, :]) * (H1 > 0)
    gw1 = E.T @ gh
    gb1 = gh.sum(axis=0)
    ge = gh @ params.w1.T
    gZ = np.zeros_like(Z)
    np.add.at(gZ, u, ge * Z[v])
    np.add.at(gZ, v, ge * Z[u])

    gX = np.zeros_like(X)
    offset = 0
    for b, (br, st) in enumerate(zip(branches, states)):
        gzb = gZ[:, offset:offset + br.out_dim]
        offset += br.out_dim
        w = st.weights
        if w.ndim == 1:
            dw = (st.stack * gzb[None]).sum(axis=(1, 2))
        else:
            dw = (st.stack * gzb[None]).sum(axis=1)
        grads[f"logits{b}"] = w * (dw - (w * dw).sum(axis=0, keepdims=True))
        ghops = _weights3(w) * gzb[None]
        gxb = diffuse_backward(st.transition, ghops)
        grads[f"proj{b}"] = X.T @ gxb
        gX += gxb @ params.projections[b].T

    ordered = {f"proj{b}": grads[f"proj{b}"] for b in range(len(branches))}
    for b in range(len(branches)):
        ordered[f"logits{b}"] = grads[f"logits{b}"]
    ordered["w1"], ordered["b1"] = gw1, gb1
    ordered["w2"], ordered["b2"] = gw2, gb2
    if params.embeddings is not None:
        d_emb = params.embeddings.shape[1]
        ordered["embed"] = gX[:, X.shape[1] - d_emb:]
    return loss_val, ordered


class Adam:
    """Adam with bias correction over named parameter dicts.

    A non-finite gradient aborts the step before any tensor is touched and
    reports the offending parameter name.
    """

    def __init__(self, lr=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {}
        self.v = {}

    def step(self, params: dict, grads: dict) -> None:
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise NumericError(f"non-finite gradient for parameter "
                                   f"'{name}' at step {self.t + 1}")
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            p = params[name]
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            m, v = self.m[name], self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


CHECKPOINT_VERSION = 1


def save_checkpoint(path, params: ModelParams, config: dict | None = None,
                    rng_state: dict | None = None) -> None:
    """Write a checkpoint: JSON meta entry + every tensor, in declared order.

    The container is an ordinary .npz archive with one ``checkpoint_meta``
    entry (format version, config echo, RNG state, tensor order) followed by
    ``param_<name>`` float64 arrays. Round-trips are bit-exact.
    """
    tensors = params.as_dict()
    meta = {
        "format_version": CHECKPOINT_VERSION,
        "config": config or {},
        "rng_state": rng_state or {},
        "tensor_order": list(tensors.keys()),
    }
    arrays = {f"param_{name}": arr for name, arr in tensors.items()}
    with open(path, "wb") as fh:
        np.savez(fh, checkpoint_meta=np.array(json.dumps(meta)), **arrays)


def load_checkpoint(path) -> tuple[ModelParams, dict]:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["checkpoint_meta"][()]))
        if meta.get("format_version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version "
                             f"{meta.get('format_version')!r}")
        named = {name: z[f"param_{name}"] for name in meta["tensor_order"]}
    n_branches = sum(1 for name in named if name.startswith("proj"))
    params = ModelParams(
        [named[f"proj{b}"] for b in range(n_branches)],
        [named[f"logits{b}"] for b in range(n_branches)],
        named["w1"], named["b1"], named["w2"], named["b2"],
        named.get("embed"))
    return params, meta
