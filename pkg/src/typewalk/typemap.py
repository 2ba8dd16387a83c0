"""Mapping vertices to structural types.

Two routes produce a :class:`TypeAssignment`: exact equality of selected
binned feature tuples (:func:`phi_concat`), or a low-rank factorization of
the feature matrix followed by k-means on the node factors
(:func:`phi_factorized`). Both are deterministic given their seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError
from .graph import Graph
from .motifs import BinnedMatrix, FeatureMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TypeAssignment:
    """Total, surjective map from node id to type id in 0..num_types-1."""

    type_of: np.ndarray
    num_types: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.type_of, dtype=np.int64)
        object.__setattr__(self, "type_of", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("type_of must be a non-empty 1-D array")
        if arr.min() < 0 or arr.max() >= self.num_types:
            raise ParameterError("type id outside 0..num_types-1")
        if np.any(np.bincount(arr, minlength=self.num_types) == 0):
            raise ParameterError("every type id in 0..num_types-1 must occur")
        arr.setflags(write=False)

    @property
    def num_nodes(self) -> int:
        return self.type_of.size

    @classmethod
    def identity(cls, num_nodes: int) -> "TypeAssignment":
        """One type per node; recovers plain node-id walks downstream."""
        return cls(np.arange(num_nodes, dtype=np.int64), num_nodes)

    @classmethod
    def from_labels(cls, labels) -> "TypeAssignment":
        """Canonicalize arbitrary labels to 0..m-1 by first appearance."""
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(rank[inverse.ravel()], int(first.size))

    def partition(self) -> list:
        """Vertex sets V_0..V_{m-1}, each nonempty."""
        order = np.argsort(self.type_of, kind="stable")
        bounds = np.searchsorted(self.type_of[order], np.arange(self.num_types + 1))
        return [order[bounds[j]:bounds[j + 1]] for j in range(self.num_types)]

    def to_tsv(self, graph: Graph, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for i in range(self.num_nodes):
                fh.write(f"{graph.original_ids[i]}\t{self.type_of[i]}\n")

    @classmethod
    def read_tsv(cls, path, graph: Graph) -> "TypeAssignment":
        """Load an externally supplied map; labels are canonicalized."""
        labels = np.full(graph.num_nodes, -1, dtype=np.int64)
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith(("#", "%")):
                    continue
                cells = line.split()
                if len(cells) < 2:
                    raise ParseError(f"{path}:{lineno}: expected node id and type id")
                try:
                    node, tid = int(cells[0]), int(cells[1])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: non-integer entry") from None
                labels[graph.internal_id(node)] = tid
        if np.any(labels < 0):
            missing = int(np.sum(labels < 0))
            raise ParseError(f"{path}: {missing} node(s) have no type row")
        return cls.from_labels(labels)


def phi_concat(binned: BinnedMatrix, feature_subset=None, op: str = "concat") -> TypeAssignment:
    """Type = equality class of the selected binned feature tuple.

    ``op="concat"`` keys on the full tuple; ``op="sum"`` keys on the sum
    of the selected bin ids. Type ids follow first appearance by node id.
    """
    labels = binned.labels if feature_subset is None else tuple(feature_subset)
    if not labels:
        raise ParameterError("feature subset must be nonempty")
    try:
        cols = [binned.labels.index(lb) for lb in labels]
    except ValueError as exc:
        raise ParameterError(f"unknown feature column in subset: {exc}") from None
    rows = binned.values[:, cols]
    if op == "concat":
        keys = rows
    elif op == "sum":
        keys = rows.sum(axis=1, keepdims=True)
    else:
        raise ParameterError(f"unknown combine operator {op!r}")
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return TypeAssignment(rank[inverse.ravel()], int(first.size))


@dataclass
class FactorModel:
    """Low-rank factor pair with its squared-error loss trace."""

    U: np.ndarray
    V: np.ndarray
    rank: int
    loss: float
    loss_trace: list = field(default_factory=list, repr=False)


def _solve_factor(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # least squares min_Z ||B - Z A^T||_F^2 via normal equations;
    # the tiny ridge only guards rank-deficient A, it is not a regularizer
    gram = A.T @ A + 1e-10 * np.eye(A.shape[1])
    return np.linalg.solve(gram, A.T @ B.T).T


def factorize(X, rank: int, iters: int = 50, seed: int = 0, tol: float = 1e-6) -> FactorModel:
    """Alternating least squares for ``X ~ U @ V.T`` (unconstrained).

    The loss ``||X - U V^T||_F^2`` is recorded after every half-sweep and
    is non-increasing; iteration stops when its relative change drops
    below ``tol``. A requested rank beyond ``min(X.shape)`` is clamped.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ParameterError("X must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ParameterError("X must be finite")
    if rank < 1:
        raise ParameterError("rank must be >= 1")
    r = min(rank, *X.shape)
    if r < rank:
        log.warning("factorization rank clamped from %d to %d", rank, r)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((X.shape[0], r)) / np.sqrt(r)
    V = rng.standard_normal((X.shape[1], r)) / np.sqrt(r)
    trace = []
    prev = np.inf
    for _ in range(iters):
        V = _solve_factor(U, X.T)
        trace.append(float(np.linalg.norm(X - U @ V.T) ** 2))
        U = _solve_factor(V, X)
        trace.append(float(np.linalg.norm(X - U @ V.T) ** 2))
        if prev < np.inf and prev - trace[-1] <= tol * max(prev, 1e-30):
            break
        prev = trace[-1]
    return FactorModel(U, V, r, trace[-1], trace)


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignment: TypeAssignment
    objective: float
    objective_trace: list = field(default_factory=list, repr=False)


def _kmeanspp_init(points: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, m):
        total = d2.sum()
        if total <= 0:
            k = int(rng.integers(n))  # all remaining points coincide
        else:
            k = int(rng.choice(n, p=d2 / total))
        chosen.append(k)
        d2 = np.minimum(d2, np.sum((points - points[k]) ** 2, axis=1))
    return points[chosen].copy()


def kmeans(points, m: int, iters: int = 100, seed: int = 0) -> KMeansResult:
    """Lloyd iterations from a k-means++ start, with empty-cluster repair.

    An empty cluster steals the farthest point of the largest cluster, so
    the returned assignment always has exactly ``m`` nonempty types.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ParameterError("points must be 2-D")
    n = points.shape[0]
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= {n}, got m={m}")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(points, m, rng)
    labels = np.zeros(n, dtype=np.int64)
    trace = []
    for _ in range(iters):
        d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)
        counts = np.bincount(labels, minlength=m)
        while np.any(counts == 0):
            empty = int(np.argmin(counts))
            donor = int(np.argmax(counts))
            members = np.flatnonzero(labels == donor)
            far = members[int(np.argmax(d2[members, donor]))]
            labels[far] = empty
            counts = np.bincount(labels, minlength=m)
        new_centroids = np.stack([points[labels == j].mean(axis=0) for j in range(m)])
        obj = float(np.sum((points - new_centroids[labels]) ** 2))
        converged = np.array_equal(new_centroids, centroids)
        centroids = new_centroids
        trace.append(obj)
        if converged:
            break
    assignment = TypeAssignment.from_labels(labels)
    remap = np.empty(m, dtype=np.int64)
    remap[assignment.type_of] = labels  # new id -> old id
    return KMeansResult(centroids[remap], assignment, trace[-1], trace)


def phi_factorized(X, rank: int, m: int, seed: int = 0, iters: int = 50,
                   kmeans_iters: int = 100) -> TypeAssignment:
    """Factorize the feature matrix, then cluster node factors into m types."""
    values = X.values if isinstance(X, (FeatureMatrix, BinnedMatrix)) else X
    model = factorize(np.asarray(values, dtype=np.float64), rank, iters=iters, seed=seed)
    return kmeans(model.U, m, iters=kmeans_iters, seed=seed).assignment
