"""Per-hop diffusion stacks and the multi-branch (inception-style) forward pass.

A diffusion stack holds H(0..K) with H(0) = X and H(k) = T @ H(k-1), computed
by repeated sparse-times-dense products; T^k is never materialized. A branch
projects the input into its own feature space, diffuses for a small number of
hops, and mixes the hops with softmax-normalized learnable weights. Branch
outputs are concatenated along the feature axis, trading width for depth.

All functions here are pure; stacks are plain (K+1, n, d) float64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SparseGraph, TransitionMatrix, build_transition


@dataclass(frozen=True)
class BranchConfig:
    """One diffusion branch: a transition kind, a hop depth, and a width."""

    kind: str = "sym"
    depth: int = 2
    out_dim: int = 64

    def __post_init__(self):
        if str(self.kind).lower() not in TransitionMatrix.KINDS:
            raise ValueError(f"unknown transition kind {self.kind!r}")
        object.__setattr__(self, "kind", str(self.kind).lower())
        if self.depth < 0:
            raise ValueError("branch depth must be >= 0")
        if self.out_dim < 1:
            raise ValueError("branch out_dim must be >= 1")


def default_branches(out_dim: int = 64) -> list[BranchConfig]:
    """The default bank: three shallow branches of equal width."""
    return [BranchConfig("sym", 1, out_dim),
            BranchConfig("sym", 2, out_dim),
            BranchConfig("rw", 3, out_dim)]


def softmax(logits: np.ndarray, axis: int = 0) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def diffuse(T: TransitionMatrix, X: np.ndarray, K: int) -> np.ndarray:
    """Return the (K+1, n, d) stack H(0..K) with H(k) = T @ H(k-1)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != T.num_nodes:
        raise ValueError(f"feature matrix shape {X.shape} does not match "
                         f"{T.num_nodes} nodes")
    if K < 0:
        raise ValueError("hop count K must be >= 0")
    stack = np.empty((K + 1,) + X.shape)
    stack[0] = X
    for k in range(1, K + 1):
        stack[k] = T.matmul(stack[k - 1])
    return stack


def _weights3(weights: np.ndarray) -> np.ndarray:
    """Broadcast per-hop weights (scalar or per-channel) over a stack."""
    if weights.ndim == 1:
        return weights[:, None, None]
    return weights[:, None, :]


def hop_combine(stack: np.ndarray, logits: np.ndarray) -> np.ndarray:
    """Convex combination of the hop matrices with softmax(logits) weights.

    ``logits`` has shape (K+1,) for one scalar weight per hop, or
    (K+1, d) for per-channel hop weights; the softmax is over the hop axis.
    """
    stack = np.asarray(stack, dtype=np.float64)
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim not in (1, 2) or logits.shape[0] != stack.shape[0]:
        raise ValueError(f"logit shape {logits.shape} does not match "
                         f"{stack.shape[0]} hop matrices")
    if logits.ndim == 2 and logits.shape[1] != stack.shape[2]:
        raise ValueError(f"per-channel logits have width {logits.shape[1]}, "
                         f"stack has {stack.shape[2]} channels")
    w = softmax(logits, axis=0)
    return (_weights3(w) * stack).sum(axis=0)


def diffuse_backward(T: TransitionMatrix, grad_hops: np.ndarray) -> np.ndarray:
    """Exact adjoint of ``diffuse``: sum_k (T^t)^k @ G(k) for per-hop grads G.

    Computed by the reverse recurrence g <- T^t @ g + G(k).
    """
    grad_hops = np.asarray(grad_hops, dtype=np.float64)
    if grad_hops.ndim != 3 or grad_hops.shape[1] != T.num_nodes:
        raise ValueError(f"gradient stack shape {grad_hops.shape} does not "
                         f"match {T.num_nodes} nodes")
    g = grad_hops[-1].copy()
    for k in range(grad_hops.shape[0] - 2, -1, -1):
        g = T.matmul_t(g) + grad_hops[k]
    return g


def branch_transitions(graph: SparseGraph,
                       branches) -> list[TransitionMatrix]:
    """One transition per branch, shared between branches of the same kind."""
    by_kind: dict[str, TransitionMatrix] = {}
    out = []
    for br in branches:
        if br.kind not in by_kind:
            by_kind[br.kind] = build_transition(graph, br.kind)
        out.append(by_kind[br.kind])
    return out


@dataclass
class BranchState:
    """Forward intermediates of one branch, kept for the backward pass."""

    stack: np.ndarray    # (K+1, n, out_dim)
    weights: np.ndarray  # softmax of the hop logits, same shape as the logits
    transition: TransitionMatrix


def inception_states(graph: SparseGraph, X: np.ndarray, branches, params,
                     transitions=None):
    """Multi-branch forward pass returning (Z, per-branch states).

    ``params`` provides one projection and one hop-logit vector per branch
    (``params.projections[b]``, ``params.hop_logits[b]``). Z is the column
    concatenation of the branch outputs.
    """
    branches = list(branches)
    if not branches:
        raise ValueError("branch list is empty")
    if len(params.projections) != len(branches) or \
            len(params.hop_logits) != len(branches):
        raise ValueError("params do not match the branch bank")
    X = np.asarray(X, dtype=np.float64)
    ts = list(transitions) if transitions is not None \
        else branch_transitions(graph, branches)
    if len(ts) != len(branches):
        raise ValueError("one transition per branch required")
    cols = []
    states = []
    for b, br in enumerate(branches):
        W = params.projections[b]
        if W.shape[0] != X.shape[1]:
            raise ValueError(f"branch {b}: projection expects "
                             f"{W.shape[0]} input channels, got {X.shape[1]}")
        if W.shape[1] != br.out_dim:
            raise ValueError(f"branch {b}: projection width {W.shape[1]} "
                             f"!= out_dim {br.out_dim}")
        stack = diffuse(ts[b], X @ W, br.depth)
        w = softmax(params.hop_logits[b], axis=0)
        cols.append((_weights3(w) * stack).sum(axis=0))
        states.append(BranchState(stack, w, ts[b]))
    return np.hstack(cols), states


def inception_forward(graph: SparseGraph, X: np.ndarray, branches, params,
                      transitions=None) -> np.ndarray:
    """Node representations from the concatenated diffusion branches."""
    Z, _ = inception_states(graph, X, branches, params, transitions)
    return Z
