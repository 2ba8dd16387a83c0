"""Link-prediction harness: edge splits, edge operators, logistic scoring, AUC.

The protocol: remove a fraction of edges (never isolating a node) as
positive test examples, sample an equal number of non-adjacent pairs as
negatives, re-run the whole embedding pipeline on the residual graph
only, featurize test pairs with a symmetric operator on the endpoint
embeddings, then fit an L2 logistic model on 10% of the labeled pairs
(with its penalty picked by 10-fold cross-validation on that same 10%)
and report AUC on the remaining 90%.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .embedding import TrainConfig
from .errors import (DegenerateLabelsError, ParameterError,
                     SplitInfeasibleError, UndefinedAUCError)
from .graph import Graph, WalkParams
from .pipeline import EmbedResult, PhiConfig, embed_graph, subseed

log = logging.getLogger(__name__)

EDGE_OPERATORS = ("mean", "hadamard")
L2_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)


@dataclass
class EdgeSplit:
    """Residual training graph plus balanced positive/negative test pairs."""

    residual: Graph
    test_pos: np.ndarray
    test_neg: np.ndarray
    seed: int
    fraction: float


def _sample_negatives(graph: Graph, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform non-adjacent pairs of the original graph, without replacement."""
    n = graph.num_nodes
    total_pairs = n * (n - 1) // 2
    n_non_edges = total_pairs - graph.num_edges
    if n_non_edges < count:
        raise SplitInfeasibleError(
            f"need {count} non-adjacent pairs but only {n_non_edges} exist")
    if total_pairs <= 2_000_000:
        iu, iv = np.triu_indices(n, k=1)
        adj = np.zeros((n, n), dtype=bool)
        e = graph.edge_array()
        adj[e[:, 0], e[:, 1]] = True
        non = np.flatnonzero(~adj[iu, iv])
        pick = rng.choice(non, size=count, replace=False)
        return np.stack([iu[pick], iv[pick]], axis=1)
    seen = set()
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise SplitInfeasibleError("negative sampling exceeded its attempt budget")
        u, v = rng.integers(0, n, size=2)
        if u == v:
            continue
        a, b = (int(u), int(v)) if u < v else (int(v), int(u))
        if (a, b) in seen or graph.has_edge(a, b):
            continue
        seen.add((a, b))
        out.append((a, b))
    return np.asarray(out, dtype=np.int64)


def split_edges(graph: Graph, fraction: float, seed: int = 0,
                forbid_isolation: bool = True) -> EdgeSplit:
    """Remove ``floor(fraction * num_edges)`` edges uniformly at random.

    A removal that would drop an endpoint to degree zero is rejected and
    redrawn (unless ``forbid_isolation`` is off). Negatives are sampled
    from the non-adjacent pairs of the *original* graph, one per removed
    edge.
    """
    if not 0.0 < fraction < 1.0:
        raise ParameterError("fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(np.random.SeedSequence((seed, 101)))
    edges = graph.edge_array()
    target = int(fraction * graph.num_edges)
    deg = graph.degrees.copy()
    pool = list(rng.permutation(graph.num_edges))
    removed_mask = np.zeros(graph.num_edges, dtype=bool)
    removed = 0
    rejections = 0
    budget = 100 * graph.num_edges
    while removed < target:
        if not pool or rejections > budget:
            raise SplitInfeasibleError(
                f"could not remove {target} edges without isolating a node "
                f"({removed} removed, {rejections} rejections)")
        k = pool.pop()
        u, v = edges[k]
        if forbid_isolation and (deg[u] <= 1 or deg[v] <= 1):
            rejections += 1
            continue
        deg[u] -= 1
        deg[v] -= 1
        removed_mask[k] = True
        removed += 1
    residual = Graph.from_edges(edges[~removed_mask], num_nodes=graph.num_nodes,
                                original_ids=graph.original_ids)
    negatives = _sample_negatives(graph, removed, rng)
    return EdgeSplit(residual, edges[removed_mask], negatives, seed, fraction)


def edge_features(a: np.ndarray, b: np.ndarray, op: str) -> np.ndarray:
    """Symmetric combination of two endpoint vectors (or row-batches)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ParameterError("endpoint vectors must have equal shape")
    if op == "mean":
        return (a + b) / 2.0
    if op == "hadamard":
        return a * b
    raise ParameterError(f"unknown edge operator {op!r}; choose from {EDGE_OPERATORS}")


@dataclass
class LRModel:
    """L2-regularized logistic model fitted by full-batch descent."""

    weights: np.ndarray
    bias: float
    l2_strength: float
    loss_trace: list = field(default_factory=list, repr=False)

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def predict_proba(self, X) -> np.ndarray:
        z = self.decision_function(X)
        return 1.0 / (1.0 + np.exp(-z))


def _lr_loss_grad(X, y, w, b, l2):
    z = X @ w + b
    p = 1.0 / (1.0 + np.exp(-z))
    # mean log loss: softplus(z) - y*z, written stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    resid = (p - y) / y.size
    return loss, X.T @ resid + l2 * w, float(resid.sum())


def train_lr(features, labels, l2: float, iters: int = 500, tol: float = 1e-6) -> LRModel:
    """Gradient descent with backtracking on the regularized logistic loss.

    Stops when the gradient norm falls below ``tol`` or after ``iters``
    steps; the recorded loss trace is non-increasing.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ParameterError("features and labels disagree on example count")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabelsError("training data contains a single class")
    if not set(classes) <= {0.0, 1.0}:
        raise ParameterError("labels must be 0/1")
    w = np.zeros(X.shape[1])
    b = 0.0
    step = 1.0
    loss, gw, gb = _lr_loss_grad(X, y, w, b, l2)
    trace = [loss]
    for _ in range(iters):
        gnorm2 = float(gw @ gw + gb * gb)
        if np.sqrt(gnorm2) < tol:
            break
        step = min(step * 2.0, 1e4)
        for _ in range(60):
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new, gw_new, gb_new = _lr_loss_grad(X, y, w_new, b_new, l2)
            if loss_new <= loss - 0.5 * step * gnorm2:
                break
            step *= 0.5
        if loss_new > loss:  # safeguard: never accept an uphill step
            break
        w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
        trace.append(loss)
    return LRModel(w, float(b), l2, trace)


def _fold_nll(model: LRModel, X, y) -> float:
    z = model.decision_function(X)
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def select_l2(features, labels, grid=L2_GRID, folds: int = 10, seed: int = 0,
              iters: int = 300) -> float:
    """Pick the penalty with the best mean held-out log loss over k folds."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).ravel()
    rng = np.random.default_rng(np.random.SeedSequence((seed, 202)))
    idx = rng.permutation(y.size)
    parts = np.array_split(idx, folds)
    best_l2, best_score = grid[0], np.inf
    for l2 in grid:
        scores = []
        for f in range(len(parts)):
            val = parts[f]
            if val.size == 0:
                continue
            tr = np.concatenate([parts[g] for g in range(len(parts)) if g != f])
            if np.unique(y[tr]).size < 2:
                continue
            model = train_lr(X[tr], y[tr], l2, iters=iters)
            scores.append(_fold_nll(model, X[val], y[val]))
        if scores and np.mean(scores) < best_score:
            best_score = float(np.mean(scores))
            best_l2 = l2
    return best_l2


def auc(scores, labels) -> float:
    """Mann-Whitney AUC; tied scores contribute 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels).astype(bool).ravel()
    if s.size != y.size:
        raise ParameterError("scores and labels disagree on length")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC needs both classes present")
    ranks = rankdata(s)
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class EvalReport:
    seed: int
    operator: str
    auc: float
    num_types: int
    dims: int
    embedding_bytes: int
    runtime_ms: float
    phi_kind: str
    fraction: float


def score_split(split: EdgeSplit, vectors: np.ndarray, operator: str, seed: int,
                train_share: float = 0.1) -> float:
    """Featurize test pairs, fit on the selection share, AUC on the rest."""
    pairs = np.concatenate([split.test_pos, split.test_neg])
    labels = np.concatenate([np.ones(len(split.test_pos)), np.zeros(len(split.test_neg))])
    feats = edge_features(vectors[pairs[:, 0]], vectors[pairs[:, 1]], operator)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 303)))
    # stratified selection keeps both classes in the tiny training share
    train_idx = []
    for cls in (0.0, 1.0):
        members = rng.permutation(np.flatnonzero(labels == cls))
        take = max(1, int(round(train_share * members.size)))
        train_idx.append(members[:take])
    train_idx = np.concatenate(train_idx)
    test_mask = np.ones(labels.size, dtype=bool)
    test_mask[train_idx] = False
    l2 = select_l2(feats[train_idx], labels[train_idx], seed=seed)
    model = train_lr(feats[train_idx], labels[train_idx], l2)
    return auc(model.decision_function(feats[test_mask]), labels[test_mask])


def evaluate_pipeline(graph: Graph, phi: PhiConfig, walk_params: WalkParams,
                      train_config: TrainConfig, operators=("hadamard",),
                      seed: int = 0, fraction: float = 0.5,
                      forbid_isolation: bool = True) -> list[EvalReport]:
    """Full link-prediction run; one report per requested edge operator.

    Features and types are recomputed on the residual graph only, so no
    test-edge information leaks into the embedding.
    """
    t0 = time.perf_counter()
    split = split_edges(graph, fraction, seed=subseed(seed, 11),
                        forbid_isolation=forbid_isolation)
    result: EmbedResult = embed_graph(split.residual, phi, walk_params,
                                      train_config, seed=subseed(seed, 12))
    vectors = result.model.node_vectors(result.assignment)
    reports = []
    for op in operators:
        value = score_split(split, vectors, op, seed=subseed(seed, 13))
        reports.append(EvalReport(
            seed=seed, operator=op, auc=value,
            num_types=result.num_types, dims=train_config.dims,
            embedding_bytes=result.storage_bytes(),
            runtime_ms=(time.perf_counter() - t0) * 1e3,
            phi_kind=phi.kind, fraction=fraction))
    return reports
