"""Type embeddings trained by skip-gram with negative sampling.

The model keeps an embedding row alpha[j] and a context row beta[j] per
type, so its storage is Theta(m * dims) numbers no matter how many nodes
the graph has. Training walks the corpus sequentially: every center
position draws a window size uniformly from 1..window, pairs up with each
in-window context, and contrasts the pair against ``negatives`` types
drawn from the corpus unigram distribution raised to 0.75. The step size
decays linearly from eta0 to eta0 * 1e-4 over the total update count.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._kernels import apply_sgns_updates
from .errors import CorpusMismatchError, ParameterError, ParseError
from .graph import build_alias
from .typemap import TypeAssignment
from .walks import WalkCorpus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    dims: int = 128
    window: int = 10
    negatives: int = 5
    eta0: float = 0.025
    epochs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dims < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ParameterError("dims, window, negatives and epochs must be >= 1")
        if not self.eta0 > 0:
            raise ParameterError("eta0 must be > 0")


@dataclass
class EmbeddingModel:
    """Embedding rows ``alpha`` and context rows ``beta``, both (m, dims)."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        self.alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        self.beta = np.ascontiguousarray(self.beta, dtype=np.float64)
        if self.alpha.ndim != 2 or self.alpha.shape != self.beta.shape:
            raise ParameterError("alpha and beta must be 2-D arrays of equal shape")
        if not (np.all(np.isfinite(self.alpha)) and np.all(np.isfinite(self.beta))):
            raise ParameterError("model entries must be finite")

    @property
    def num_types(self) -> int:
        return self.alpha.shape[0]

    @property
    def dims(self) -> int:
        return self.alpha.shape[1]

    def nbytes(self) -> int:
        """Bytes needed to store the learned embedding rows."""
        return int(self.alpha.nbytes)

    def node_vectors(self, assignment: TypeAssignment) -> np.ndarray:
        """Per-node embedding: the row of the node's type."""
        if assignment.num_types != self.num_types:
            raise CorpusMismatchError("assignment and model disagree on type count")
        return self.alpha[assignment.type_of]

    def save(self, path, beta_path=None) -> None:
        """Text export: header ``m dims``, then ``type v1 .. vD`` rows."""
        def write(fname, matrix):
            with open(fname, "w", encoding="utf-8") as fh:
                fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
                for j in range(matrix.shape[0]):
                    fh.write(str(j) + " " + " ".join(f"{v:.17g}" for v in matrix[j]) + "\n")

        write(path, self.alpha)
        if beta_path is not None:
            write(beta_path, self.beta)

    @classmethod
    def load(cls, path, beta_path=None) -> "EmbeddingModel":
        def read(fname):
            with open(fname, "r", encoding="utf-8") as fh:
                header = fh.readline().split()
                if len(header) != 2:
                    raise ParseError(f"{fname}: expected 'm dims' header")
                m, dims = int(header[0]), int(header[1])
                out = np.zeros((m, dims))
                for lineno, raw in enumerate(fh, 2):
                    if not raw.strip():
                        continue
                    cells = raw.split()
                    if len(cells) != dims + 1:
                        raise ParseError(f"{fname}:{lineno}: expected {dims + 1} columns")
                    out[int(cells[0])] = [float(c) for c in cells[1:]]
            return out

        alpha = read(path)
        beta = read(beta_path) if beta_path is not None else np.zeros_like(alpha)
        return cls(alpha, beta)


def softmax_row(model: EmbeddingModel, i: int) -> np.ndarray:
    """Full softmax over contexts for center type i (max-shifted for stability)."""
    if not 0 <= i < model.num_types:
        raise ParameterError(f"type id {i} out of range")
    logits = model.beta @ model.alpha[i]
    logits -= logits.max()
    e = np.exp(logits)
    return e / e.sum()


def softmax_prob(model: EmbeddingModel, i: int, j: int) -> float:
    """P(context j | center i) under the full softmax."""
    if not 0 <= j < model.num_types:
        raise ParameterError(f"type id {j} out of range")
    return float(softmax_row(model, i)[j])


def _log_sigmoid(z: np.ndarray | float):
    return -np.logaddexp(0.0, -np.asarray(z, dtype=np.float64))


def sgns_objective(model: EmbeddingModel, pair, negatives) -> float:
    """log sigma(alpha_i . beta_j) + sum_k log sigma(-alpha_i . beta_k)."""
    i, j = pair
    negatives = np.asarray(negatives, dtype=np.int64)
    pos = _log_sigmoid(model.alpha[i] @ model.beta[j])
    neg = _log_sigmoid(-(model.beta[negatives] @ model.alpha[i])) if negatives.size else 0.0
    return float(pos + np.sum(neg))


def sgns_gradients(model: EmbeddingModel, pair, negatives):
    """Analytic gradient of :func:`sgns_objective` w.r.t. alpha and beta.

    Returns full (m, dims) matrices so duplicate negative draws
    accumulate the way a perturbation of the shared row sees them.
    """
    i, j = pair
    negatives = np.asarray(negatives, dtype=np.int64)
    g_alpha = np.zeros_like(model.alpha)
    g_beta = np.zeros_like(model.beta)
    s = 1.0 / (1.0 + np.exp(-(model.alpha[i] @ model.beta[j])))
    g_alpha[i] += (1.0 - s) * model.beta[j]
    g_beta[j] += (1.0 - s) * model.alpha[i]
    for k in negatives:
        sk = 1.0 / (1.0 + np.exp(-(model.alpha[i] @ model.beta[k])))
        g_alpha[i] -= sk * model.beta[k]
        g_beta[k] -= sk * model.alpha[i]
    return g_alpha, g_beta


def _context_pairs(tokens: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Flatten (walk, position) windows into center/context symbol arrays."""
    n_walks, length = tokens.shape
    cnt = (hi - lo).ravel()  # contexts per center (window minus the center itself)
    total = int(cnt.sum())
    if total == 0:
        return (np.empty(0, dtype=np.int64),) * 2
    centers = np.repeat(tokens.ravel(), cnt)
    rows = np.repeat(np.arange(n_walks), cnt.reshape(n_walks, length).sum(axis=1))
    starts = np.concatenate([[0], np.cumsum(cnt)[:-1]])
    offset = np.arange(total, dtype=np.int64) - np.repeat(starts, cnt)
    center_pos = np.repeat(np.tile(np.arange(length), n_walks), cnt)
    ctx_pos = np.repeat(lo.ravel(), cnt) + offset
    ctx_pos += ctx_pos >= center_pos  # skip the center slot itself
    contexts = tokens[rows, ctx_pos]
    return centers, contexts


def _prepare(corpus: WalkCorpus, num_types: int, config: TrainConfig):
    tokens = np.ascontiguousarray(corpus.sequences, dtype=np.int64)
    if tokens.size == 0:
        raise CorpusMismatchError("empty corpus")
    if tokens.min() < 0 or tokens.max() >= num_types:
        raise CorpusMismatchError(
            f"corpus symbol {int(tokens.max())} outside model range 0..{num_types - 1}")
    rng = np.random.default_rng(config.seed)
    alpha = (rng.random((num_types, config.dims)) - 0.5) / config.dims
    beta = np.zeros((num_types, config.dims))
    counts = np.bincount(tokens.ravel(), minlength=num_types).astype(np.float64)
    neg_table = build_alias(counts ** 0.75)
    # windows for the whole run are drawn up front so the total update
    # count, and with it the exact decay schedule, is known in advance
    positions = np.arange(tokens.shape[1])
    windows = rng.integers(1, config.window + 1,
                           size=(config.epochs,) + tokens.shape, dtype=np.int64)
    lo = np.maximum(0, positions - windows)
    hi = np.minimum(tokens.shape[1] - 1, positions + windows)
    total_updates = int((hi - lo).sum())
    return tokens, rng, alpha, beta, neg_table, lo, hi, total_updates


def _train_impl(corpus, num_types, config, trace_pair):
    tokens, rng, alpha, beta, neg_table, lo, hi, total = _prepare(corpus, num_types, config)
    eta_end = config.eta0 * 1e-4
    if trace_pair is None:
        trace_i = trace_j = -1
        trace = np.empty(0)
    else:
        trace_i, trace_j = trace_pair
        trace = np.zeros(total)
    pair_stream = [] if trace_pair is not None else None
    done = 0
    for e in range(config.epochs):
        centers, contexts = _context_pairs(tokens, lo[e], hi[e])
        slots = rng.integers(0, neg_table.n, size=(centers.size, config.negatives))
        coins = rng.random(size=slots.shape)
        negs = np.where(coins < neg_table.prob[slots], slots, neg_table.alias[slots])
        apply_sgns_updates(alpha, beta, centers, contexts,
                           np.ascontiguousarray(negs, dtype=np.int64),
                           float(config.eta0), float(eta_end),
                           total, done, trace_i, trace_j, trace)
        if pair_stream is not None:
            pair_stream.append(np.stack([centers, contexts], axis=1))
        done += centers.size
    model = EmbeddingModel(alpha, beta)
    pairs = np.concatenate(pair_stream) if pair_stream else None
    return model, trace, pairs, done


def train(corpus: WalkCorpus, num_types: int, config: TrainConfig) -> EmbeddingModel:
    """Train type embeddings from a walk corpus.

    Deterministic for a fixed corpus, config and seed: all random draws
    (init, window sizes, negatives) come from one seeded generator and
    updates are applied strictly sequentially.
    """
    model, _, _, done = _train_impl(corpus, num_types, config, None)
    log.debug("sgns: %d pair updates over %d epochs", done, config.epochs)
    return model


def train_with_trace(corpus: WalkCorpus, num_types: int, config: TrainConfig, pair):
    """Like :func:`train`, also recording alpha_i . beta_j after every update.

    Returns (model, trace, pairs) where trace[k] is the tracked logit
    after update k and pairs[k] is that update's (center, context).
    """
    model, trace, pairs, _ = _train_impl(corpus, num_types, config, pair)
    return model, trace, pairs
