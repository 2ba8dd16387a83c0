"""Undirected graph container, edge-list I/O, and walk transition tables.

Graphs are stored in CSR form (``indptr``/``indices``) with strictly
ascending neighbor lists, no self-loops and no parallel edges. Node ids
found in edge-list files are compacted to dense internal ids
``0..num_nodes-1`` in first-appearance order; the original ids are kept so
files, attribute tables and reports can keep speaking the external id
space.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNodeError, EmptyGraphError, ParameterError, ParseError

log = logging.getLogger(__name__)

_COMMENT_PREFIXES = ("#", "%")


class Graph:
    """Immutable undirected simple graph with a sorted-adjacency index.

    Attributes
    ----------
    indptr : int64 array, shape (num_nodes + 1,)
        CSR row pointers into ``indices``.
    indices : int64 array, shape (2 * num_edges,)
        Concatenated neighbor lists, strictly ascending per node.
    degrees : int64 array, shape (num_nodes,)
        ``degrees[i] == len(neighbors(i))``.
    original_ids : int64 array, shape (num_nodes,)
        External id of each internal node.
    """

    __slots__ = ("indptr", "indices", "degrees", "num_nodes", "num_edges",
                 "original_ids", "_id_lookup")

    def __init__(self, indptr, indices, original_ids=None):
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        if indptr.ndim != 1 or indptr.size == 0 or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValueError("malformed CSR index arrays")
        self.indptr = indptr
        self.indices = indices
        self.degrees = np.diff(indptr)
        self.num_nodes = int(indptr.size - 1)
        self.num_edges = int(indices.size // 2)
        if original_ids is None:
            original_ids = np.arange(self.num_nodes, dtype=np.int64)
        self.original_ids = np.ascontiguousarray(original_ids, dtype=np.int64)
        if self.original_ids.size != self.num_nodes:
            raise ValueError("original_ids length does not match node count")
        self._validate()
        for arr in (self.indptr, self.indices, self.degrees, self.original_ids):
            arr.setflags(write=False)
        self._id_lookup = {int(o): i for i, o in enumerate(self.original_ids)}

    def _validate(self):
        n, dst = self.num_nodes, self.indices
        if dst.size == 0:
            return
        if dst.min() < 0 or dst.max() >= n:
            raise ValueError("neighbor id out of range")
        src = np.repeat(np.arange(n, dtype=np.int64), self.degrees)
        if np.any(src == dst):
            raise ValueError("self-loop in adjacency")
        row_start = np.zeros(dst.size, dtype=bool)
        row_start[self.indptr[:-1][self.degrees > 0]] = True
        ascending = np.empty(dst.size, dtype=bool)
        ascending[0] = True
        ascending[1:] = (np.diff(dst) > 0) | row_start[1:]
        if not ascending.all():
            raise ValueError("neighbor lists must be strictly ascending")
        # symmetry: the (dst, src) pairs sorted back must reproduce (src, dst)
        order = np.lexsort((src, dst))
        if not (np.array_equal(dst[order], src) and np.array_equal(src[order], dst)):
            raise ValueError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, edges, num_nodes=None, original_ids=None) -> "Graph":
        """Build a graph from an iterable of (u, v) internal-id pairs.

        Self-loops are dropped and duplicate/reversed duplicates merged.
        ``num_nodes`` may exceed the largest referenced id, leaving the
        extra nodes isolated.
        """
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        e = e[e[:, 0] != e[:, 1]]
        if num_nodes is None:
            num_nodes = int(e.max()) + 1 if e.size else 0
        if e.size and (e.min() < 0 or e.max() >= num_nodes):
            raise ValueError("edge endpoint out of range")
        if e.size:
            canon = np.stack([e.min(axis=1), e.max(axis=1)], axis=1)
            canon = np.unique(canon, axis=0)
            both = np.concatenate([canon, canon[:, ::-1]], axis=0)
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            counts = np.bincount(both[:, 0], minlength=num_nodes)
            indices = both[:, 1]
        else:
            counts = np.zeros(num_nodes, dtype=np.int64)
            indices = np.empty(0, dtype=np.int64)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return cls(indptr, indices, original_ids=original_ids)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node ``i`` (read-only view)."""
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        k = np.searchsorted(row, v)
        return bool(k < row.size and row[k] == v)

    def edge_array(self) -> np.ndarray:
        """All undirected edges as an (num_edges, 2) array with u < v."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def internal_id(self, original: int) -> int:
        """Map an external node id to its internal id."""
        try:
            return self._id_lookup[int(original)]
        except KeyError:
            raise ParseError(f"unknown node id {original!r}") from None

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list into a :class:`Graph`.

    Lines starting with ``#`` or ``%`` and blank lines are skipped. Each
    remaining line must start with two non-negative integer node ids;
    extra tokens are ignored. Self-loops are dropped (their ids still
    register in first-appearance order), duplicate and reversed-duplicate
    edges are merged.

    Raises
    ------
    ParseError
        On a non-integer or negative id, with the offending line number.
    EmptyGraphError
        If no edge survives cleaning.
    OSError
        If the file cannot be read.
    """
    remap: dict[int, int] = {}

    def intern(x: int) -> int:
        if x not in remap:
            remap[x] = len(remap)
        return remap[x]

    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith(_COMMENT_PREFIXES):
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise ParseError(f"{path}:{lineno}: expected two node ids, got {line!r}")
            try:
                a, b = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            if a < 0 or b < 0:
                raise ParseError(f"{path}:{lineno}: negative node id in {line!r}")
            ia, ib = intern(a), intern(b)
            if ia != ib:
                edges.append((ia, ib))
    if not edges:
        raise EmptyGraphError(f"{path}: no edges left after cleaning")
    original = np.fromiter(remap.keys(), dtype=np.int64, count=len(remap))
    return Graph.from_edges(edges, num_nodes=len(remap), original_ids=original)


def save_edge_list(graph: Graph, path) -> None:
    """Write the graph as one ``u v`` line per edge, in original ids."""
    orig = graph.original_ids
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in graph.edge_array():
            fh.write(f"{orig[u]} {orig[v]}\n")


def connected_components(graph: Graph) -> np.ndarray:
    """Component label per node, labels in order of first discovery."""
    labels = np.full(graph.num_nodes, -1, dtype=np.int64)
    current = 0
    for s in range(graph.num_nodes):
        if labels[s] >= 0:
            continue
        labels[s] = current
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in graph.neighbors(u):
                if labels[v] < 0:
                    labels[v] = current
                    queue.append(int(v))
        current += 1
    return labels


def is_connected(graph: Graph) -> bool:
    if graph.num_nodes == 0:
        return False
    return bool(connected_components(graph).max() == 0)


@dataclass(frozen=True)
class WalkParams:
    """Walk-generation hyperparameters.

    ``return_param`` and ``inout_param`` follow the usual biased
    second-order convention: from state (t -> v) a candidate x gets weight
    1/return_param if x == t, weight 1 if x is adjacent to t, and weight
    1/inout_param otherwise. Both equal to 1 reduces to the plain uniform
    walk.
    """

    walks_per_node: int = 10
    walk_length: int = 80
    return_param: float = 1.0
    inout_param: float = 1.0

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ParameterError("walks_per_node must be >= 1")
        if self.walk_length < 1:
            raise ParameterError("walk_length must be >= 1")
        if not (self.return_param > 0 and self.inout_param > 0):
            raise ParameterError("return_param and inout_param must be > 0")

    @property
    def is_unbiased(self) -> bool:
        return self.return_param == 1.0 and self.inout_param == 1.0


@dataclass(frozen=True)
class AliasTable:
    """Alias-method table for O(1) categorical sampling.

    ``prob[k]`` is the acceptance probability of slot ``k`` and
    ``alias[k]`` the fallback outcome, per Vose's construction.
    """

    prob: np.ndarray
    alias: np.ndarray

    def __post_init__(self):
        if self.prob.shape != self.alias.shape or self.prob.ndim != 1:
            raise ValueError("prob and alias must be 1-D arrays of equal length")
        self.prob.setflags(write=False)
        self.alias.setflags(write=False)

    @property
    def n(self) -> int:
        return self.prob.size

    def sample_index(self, u_slot: float, u_coin: float) -> int:
        """Draw one outcome from two uniforms in [0, 1)."""
        k = int(u_slot * self.prob.size)
        if k >= self.prob.size:  # guards u_slot == 1.0 exactly
            k = self.prob.size - 1
        return k if u_coin < self.prob[k] else int(self.alias[k])

    def sample(self, rng: np.random.Generator, size=None):
        """Vectorized sampling with a numpy Generator."""
        slots = rng.integers(0, self.prob.size, size=size)
        coins = rng.random(size=size)
        return np.where(coins < self.prob[slots], slots, self.alias[slots])

    def reconstructed(self) -> np.ndarray:
        """Exact categorical distribution implied by the two rows."""
        out = self.prob / self.n
        np.add.at(out, self.alias, (1.0 - self.prob) / self.n)
        return out


def build_alias(weights) -> AliasTable:
    """Build an :class:`AliasTable` from non-negative weights (Vose)."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ParameterError("weights must be a non-empty 1-D array")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ParameterError("weights must be finite and non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise ParameterError("weights must not all be zero")
    n = w.size
    scaled = w * (n / total)
    prob = np.empty(n, dtype=np.float64)
    alias = np.arange(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        big = large.pop()
        prob[s] = scaled[s]
        alias[s] = big
        scaled[big] = (scaled[big] + scaled[s]) - 1.0
        (small if scaled[big] < 1.0 else large).append(big)
    while large:
        prob[large.pop()] = 1.0
    while small:
        prob[small.pop()] = 1.0  # float leftovers; exact within rounding
    return AliasTable(prob, alias)


def build_first_order(graph: Graph) -> list:
    """Per-node alias tables over the uniform neighbor distribution.

    Isolated nodes get ``None``; starting a walk there is a
    :class:`DegenerateNodeError` at walk time.
    """
    tables = []
    for i in range(graph.num_nodes):
        d = graph.degrees[i]
        tables.append(build_alias(np.ones(d)) if d > 0 else None)
    return tables


@dataclass
class SecondOrderTables:
    """Per-directed-edge alias tables for biased second-order walks.

    ``tables[k]`` governs the step taken from state (t -> v), where ``k``
    is the CSR slot of v inside t's neighbor list. Outcome indices point
    into the neighbor list of v.
    """

    graph: Graph
    params: WalkParams
    tables: list = field(repr=False)

    def table(self, prev: int, cur: int) -> AliasTable:
        row = self.graph.neighbors(prev)
        k = int(np.searchsorted(row, cur))
        if k >= row.size or row[k] != cur:
            raise ParameterError(f"({prev}, {cur}) is not an edge")
        return self.tables[self.graph.indptr[prev] + k]


def second_order_weights(graph: Graph, prev: int, cur: int, params: WalkParams) -> np.ndarray:
    """Unnormalized bias weights over the neighbors of ``cur``."""
    nxt = graph.neighbors(cur)
    prev_nb = graph.neighbors(prev)
    w = np.where(np.isin(nxt, prev_nb, assume_unique=True), 1.0, 1.0 / params.inout_param)
    w[nxt == prev] = 1.0 / params.return_param
    return w


def build_second_order(graph: Graph, params: WalkParams) -> SecondOrderTables:
    """Alias tables for every directed edge (t -> v) of the graph."""
    src = np.repeat(np.arange(graph.num_nodes, dtype=np.int64), graph.degrees)
    tables = []
    for k in range(graph.indices.size):
        t = int(src[k])
        v = int(graph.indices[k])
        tables.append(build_alias(second_order_weights(graph, t, v, params)))
    return SecondOrderTables(graph, params, tables)


def uniform_step_probabilities(graph: Graph, node: int) -> np.ndarray:
    """First-order distribution over the neighbors of ``node``."""
    d = graph.degrees[node]
    if d == 0:
        raise DegenerateNodeError(f"node {node} has no neighbors")
    return np.full(d, 1.0 / d)
