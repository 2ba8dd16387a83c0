"""Per-node structural features: small-motif participation counts and binning.

A node's feature vector counts the connected induced subgraphs on 2-4
vertices it participates in:

    x1  edge                x4  3-star (claw)       x7  tailed triangle (paw)
    x2  2-star (path P3)    x5  4-path              x8  chordal 4-cycle (diamond)
    x3  triangle            x6  4-cycle             x9  4-clique

:func:`count_motifs` computes these with adjacency intersections plus
inclusion-exclusion identities over non-induced copy counts, so it scales
to large sparse graphs; :func:`brute_force_motifs` enumerates vertex
subsets directly and serves as the independent oracle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ParseError, SizeLimitError
from .graph import Graph

log = logging.getLogger(__name__)

MOTIF_LABELS = ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9")


@dataclass
class FeatureMatrix:
    """Per-node feature table: ``values[i]`` is the K-vector of node i."""

    values: np.ndarray
    labels: tuple

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = tuple(self.labels)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.labels):
            raise ParameterError("feature matrix shape does not match labels")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ParameterError("feature values must be finite and non-negative")

    @property
    def num_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def num_features(self) -> int:
        return self.values.shape[1]

    def column(self, label: str) -> np.ndarray:
        try:
            k = self.labels.index(label)
        except ValueError:
            raise ParameterError(f"unknown feature column {label!r}") from None
        return self.values[:, k]

    def select(self, labels) -> "FeatureMatrix":
        labels = tuple(labels)
        if not labels:
            raise ParameterError("empty feature subset")
        cols = np.stack([self.column(lb) for lb in labels], axis=1)
        return FeatureMatrix(cols, labels)

    def hstack(self, other: "FeatureMatrix") -> "FeatureMatrix":
        if other.num_nodes != self.num_nodes:
            raise ParameterError("cannot stack feature matrices with different node counts")
        return FeatureMatrix(np.concatenate([self.values, other.values], axis=1),
                             self.labels + other.labels)

    def to_tsv(self, graph: Graph, path) -> None:
        """Write ``node<TAB>label...`` header plus one row per node (original ids)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("node\t" + "\t".join(self.labels) + "\n")
            for i in range(self.num_nodes):
                row = "\t".join(f"{v:.10g}" for v in self.values[i])
                fh.write(f"{graph.original_ids[i]}\t{row}\n")

    @classmethod
    def read_tsv(cls, path, graph: Graph) -> "FeatureMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split("\t")
            if len(header) < 2 or header[0] != "node":
                raise ParseError(f"{path}: expected 'node<TAB>label...' header")
            labels = tuple(header[1:])
            values = np.zeros((graph.num_nodes, len(labels)))
            for lineno, raw in enumerate(fh, 2):
                if not raw.strip():
                    continue
                cells = raw.split()
                if len(cells) != len(labels) + 1:
                    raise ParseError(f"{path}:{lineno}: expected {len(labels) + 1} columns")
                i = graph.internal_id(int(cells[0]))
                values[i] = [float(c) for c in cells[1:]]
        return cls(values, labels)


@dataclass
class BinnedMatrix:
    """Integer bin ids per node and column, plus the bin fraction used."""

    values: np.ndarray
    labels: tuple
    delta: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        self.labels = tuple(self.labels)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.labels):
            raise ParameterError("binned matrix shape does not match labels")

    @property
    def num_nodes(self) -> int:
        return self.values.shape[0]


def _comb2(x):
    return x * (x - 1) // 2


def _comb3(x):
    return x * (x - 1) * (x - 2) // 6


def _adjacency_csr(graph: Graph) -> sp.csr_matrix:
    data = np.ones(graph.indices.size, dtype=np.int64)
    return sp.csr_matrix((data, graph.indices.copy(), graph.indptr.copy()),
                         shape=(graph.num_nodes, graph.num_nodes))


def _edge_scan(graph: Graph, adj_sets):
    """Edge-centric pass collecting 4-clique and diamond ingredients.

    Returns per-node arrays: 4-clique discoveries (6 per clique per node),
    the non-induced diamond copy count, and sum_{j in N(i)} d_j * T_ij
    where T_ij is the triangle count of edge (i, j).
    """
    n = graph.num_nodes
    deg = graph.degrees
    k4_disc = np.zeros(n, dtype=np.int64)
    diamond = np.zeros(n, dtype=np.int64)
    paw_edge = np.zeros(n, dtype=np.int64)
    for u, v in graph.edge_array():
        common = np.intersect1d(graph.neighbors(u), graph.neighbors(v),
                                assume_unique=True)
        t_e = common.size
        paw_edge[u] += deg[v] * t_e
        paw_edge[v] += deg[u] * t_e
        if t_e == 0:
            continue
        pairs = _comb2(t_e)
        diamond[u] += pairs
        diamond[v] += pairs
        diamond[common] += t_e - 1
        if t_e >= 2:
            for a in range(t_e - 1):
                wa = common[a]
                sa = adj_sets[wa]
                for b in range(a + 1, t_e):
                    wb = common[b]
                    if wb in sa:
                        k4_disc[u] += 1
                        k4_disc[v] += 1
                        k4_disc[wa] += 1
                        k4_disc[wb] += 1
    return k4_disc, diamond, paw_edge


def count_motifs(graph: Graph) -> FeatureMatrix:
    """Count, per node, the connected induced 2-4 vertex subgraphs it is in.

    Triangle structure comes from sorted-adjacency intersections; the
    4-node classes are recovered from non-induced copy counts by
    inclusion-exclusion over their supergraphs. All arithmetic is exact
    integer work.
    """
    n = graph.num_nodes
    d = graph.degrees.astype(np.int64)
    if n == 0:
        return FeatureMatrix(np.zeros((0, 9)), MOTIF_LABELS)
    A = _adjacency_csr(graph)
    A2 = A @ A
    tri_edge = A2.multiply(A)  # entry (i, j) = triangles through edge (i, j)
    t = np.asarray(tri_edge.sum(axis=1)).ravel() // 2

    adj_d = np.asarray(A @ d).ravel() if graph.num_edges else np.zeros(n, dtype=np.int64)
    x2 = _comb2(d) + adj_d - d - 3 * t

    adj_sets = [set(graph.neighbors(i).tolist()) for i in range(n)]
    k4_disc, nonind_diamond, paw_edge = _edge_scan(graph, adj_sets)
    x9 = k4_disc // 6

    # non-induced 4-cycle copies through i: sum_k C(common(i, k), 2), k != i
    c = A2.copy()
    c.data = _comb2(c.data)
    nonind_c4 = np.asarray(c.sum(axis=1)).ravel() - _comb2(d)

    adj_t = np.asarray(A @ t).ravel()
    nonind_paw = (adj_t - 2 * t) + t * (d - 6) + paw_edge
    nonind_claw = _comb3(d) + np.asarray(A @ _comb2(d - 1)).ravel()

    w_sum = adj_d - d  # W_i = sum_{b in N(i)} (d_b - 1)
    p4_end = np.asarray(A @ w_sum).ravel() - d * (d - 1) - 2 * t
    p4_int = (d - 1) * (adj_d - d) - 2 * t
    nonind_p4 = p4_end + p4_int

    x8 = nonind_diamond - 6 * x9
    x6 = nonind_c4 - x8 - 3 * x9
    x7 = nonind_paw - 4 * x8 - 12 * x9
    x4 = nonind_claw - x7 - 2 * x8 - 4 * x9
    x5 = nonind_p4 - 2 * x7 - 4 * x6 - 6 * x8 - 12 * x9

    cols = np.stack([d, x2, t, x4, x5, x6, x7, x8, x9], axis=1)
    return FeatureMatrix(cols, MOTIF_LABELS)


# degree-multiset signatures of the connected 4-vertex graphs
_FOUR_NODE_CLASS = {
    (3, (1, 1, 1, 3)): 3,  # claw      -> x4
    (3, (1, 1, 2, 2)): 4,  # 4-path    -> x5
    (4, (2, 2, 2, 2)): 5,  # 4-cycle   -> x6
    (4, (1, 2, 2, 3)): 6,  # paw       -> x7
    (5, (2, 2, 3, 3)): 7,  # diamond   -> x8
    (6, (3, 3, 3, 3)): 8,  # 4-clique  -> x9
}


def brute_force_motifs(graph: Graph) -> FeatureMatrix:
    """Oracle implementation of :func:`count_motifs` by subset enumeration.

    Classifies the induced subgraph of every 2-, 3- and 4-vertex subset
    by edge count and degree multiset. Guarded to 64 nodes.
    """
    n = graph.num_nodes
    if n > 64:
        raise SizeLimitError(f"brute-force motif counting capped at 64 nodes, got {n}")
    adj = [set(graph.neighbors(i).tolist()) for i in range(n)]
    counts = np.zeros((n, 9), dtype=np.int64)

    for u, v in combinations(range(n), 2):
        if v in adj[u]:
            counts[u, 0] += 1
            counts[v, 0] += 1

    for a, b, c in combinations(range(n), 3):
        e = (b in adj[a]) + (c in adj[a]) + (c in adj[b])
        if e == 3:
            counts[[a, b, c], 2] += 1
        elif e == 2:
            counts[[a, b, c], 1] += 1

    for quad in combinations(range(n), 4):
        a, b, c, e = quad
        ab = b in adj[a]
        ac = c in adj[a]
        ae = e in adj[a]
        bc = c in adj[b]
        be = e in adj[b]
        ce = e in adj[c]
        m = ab + ac + ae + bc + be + ce
        if m < 3:
            continue
        degs = (ab + ac + ae, ab + bc + be, ac + bc + ce, ae + be + ce)
        if 0 in degs:
            continue  # m == 3 with an isolated vertex: triangle plus spare
        cls = _FOUR_NODE_CLASS.get((m, tuple(sorted(degs))))
        if cls is not None:
            counts[list(quad), cls] += 1
    return FeatureMatrix(counts, MOTIF_LABELS)


def log_bin(column, delta: float) -> np.ndarray:
    """Geometric bucketing of a feature column.

    Nodes are sorted ascending by value (ties broken by node id); the
    first ceil(delta * remaining) of the still-unassigned nodes go to the
    current bin, repeatedly, so bin 0 is always nonempty and bin ids are
    contiguous from 0.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError("delta must lie strictly between 0 and 1")
    values = np.asarray(column, dtype=np.float64)
    if values.ndim != 1:
        raise ParameterError("log_bin expects a single column")
    n = values.size
    order = np.lexsort((np.arange(n), values))
    bins = np.empty(n, dtype=np.int64)
    start, b = 0, 0
    while start < n:
        take = int(np.ceil(delta * (n - start)))
        bins[order[start:start + take]] = b
        start += take
        b += 1
    return bins


def bin_features(features: FeatureMatrix, delta: float) -> BinnedMatrix:
    """Apply :func:`log_bin` column-wise."""
    cols = [log_bin(features.values[:, k], delta) for k in range(features.num_features)]
    stacked = np.stack(cols, axis=1) if cols else np.zeros((features.num_nodes, 0), dtype=np.int64)
    return BinnedMatrix(stacked, features.labels, delta)


def ingest_attributes(path, graph: Graph) -> FeatureMatrix:
    """Read a TSV of ``node_id value...`` rows into a feature matrix.

    Node ids are in the original (pre-remap) space. Nodes absent from the
    file get all-zero rows and a logged warning.
    """
    rows: dict[int, list[float]] = {}
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith(("#", "%")):
                continue
            cells = line.split()
            if len(cells) < 2:
                raise ParseError(f"{path}:{lineno}: expected node id and at least one value")
            try:
                node = int(cells[0])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer node id {cells[0]!r}") from None
            try:
                vals = [float(c) for c in cells[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad numeric cell ({exc})") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} values, got {len(vals)}")
            rows[graph.internal_id(node)] = vals
    if width is None:
        raise ParseError(f"{path}: no attribute rows found")
    values = np.zeros((graph.num_nodes, width))
    for i, vals in rows.items():
        values[i] = vals
    missing = graph.num_nodes - len(rows)
    if missing:
        log.warning("%s: %d node(s) missing from attribute file; rows left zero", path, missing)
    labels = tuple(f"a{k + 1}" for k in range(width))
    return FeatureMatrix(values, labels)
