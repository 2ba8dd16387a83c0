"""Type-emitting random-walk corpora.

Walk mechanics run in node space; only the emission maps through the
type assignment, so the emitted corpus is exactly the image of the
node-id corpus under ``type_of``. Every walk owns an RNG stream derived
from (seed, round, start node), which makes corpora reproducible and
independent of traversal order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNodeError, EmptyCorpusError, ParameterError
from .graph import (Graph, WalkParams, build_first_order, build_second_order,
                    second_order_weights, uniform_step_probabilities)
from .typemap import TypeAssignment

log = logging.getLogger(__name__)


@dataclass
class WalkCorpus:
    """Fixed-length symbol sequences plus the parameters that made them."""

    sequences: np.ndarray
    walks_per_node: int
    walk_length: int
    num_symbols: int
    start_nodes: np.ndarray | None = None

    def __post_init__(self):
        self.sequences = np.ascontiguousarray(self.sequences, dtype=np.int64)
        if self.sequences.ndim != 2:
            raise ParameterError("sequences must be a 2-D array")
        if self.sequences.size and (self.sequences.min() < 0
                                    or self.sequences.max() >= self.num_symbols):
            raise ParameterError("corpus symbol outside 0..num_symbols-1")

    @property
    def num_walks(self) -> int:
        return self.sequences.shape[0]

    def save_text(self, path) -> None:
        """One walk per line, space-separated symbol ids."""
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.sequences:
                fh.write(" ".join(str(s) for s in row) + "\n")

    @classmethod
    def load_text(cls, path, walks_per_node: int = 0, num_symbols: int | None = None) -> "WalkCorpus":
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rows.append([int(tok) for tok in line.split()])
        seqs = np.asarray(rows, dtype=np.int64)
        if num_symbols is None:
            num_symbols = int(seqs.max()) + 1 if seqs.size else 0
        return cls(seqs, walks_per_node, seqs.shape[1] if seqs.size else 0, num_symbols)


def _run_walk(graph: Graph, start: int, length: int, uniforms: np.ndarray,
              node_tables, edge_tables) -> np.ndarray:
    indptr, indices = graph.indptr, graph.indices
    nodes = np.empty(length, dtype=np.int64)
    nodes[0] = start
    cur, prev = start, -1
    for step in range(1, length):
        if prev < 0 or edge_tables is None:
            table = node_tables[cur]
        else:
            table = edge_tables.table(prev, cur)
        k = table.sample_index(uniforms[2 * step - 2], uniforms[2 * step - 1])
        nxt = int(indices[indptr[cur] + k])
        nodes[step] = nxt
        prev, cur = cur, nxt
    return nodes


def generate_walks(graph: Graph, assignment: TypeAssignment, params: WalkParams,
                   seed: int = 0, order: str = "auto") -> WalkCorpus:
    """Generate R walks of length L per non-isolated node, emitting types.

    Each round visits the start nodes in a seeded random permutation;
    the corpus rows are stored sorted by (round, start node) so output
    is independent of traversal schedule. ``order`` picks the transition
    machinery: "first", "second", or "auto" (second only when the bias
    parameters differ from 1).
    """
    if assignment.num_nodes != graph.num_nodes:
        raise ParameterError("graph and type assignment disagree on node count")
    if order not in ("auto", "first", "second"):
        raise ParameterError(f"unknown walk order {order!r}")
    active = np.flatnonzero(graph.degrees > 0)
    if active.size == 0:
        raise EmptyCorpusError("every node is isolated; no walk can start")
    skipped = graph.num_nodes - active.size
    if skipped:
        log.warning("skipping %d isolated node(s) as walk starts", skipped)

    use_second = order == "second" or (order == "auto" and not params.is_unbiased)
    node_tables = build_first_order(graph)
    edge_tables = build_second_order(graph, params) if use_second else None

    R, L = params.walks_per_node, params.walk_length
    rank_of = {int(v): k for k, v in enumerate(active)}
    sequences = np.empty((R * active.size, L), dtype=np.int64)
    starts = np.empty(R * active.size, dtype=np.int64)
    type_of = assignment.type_of
    for rnd in range(R):
        perm_rng = np.random.default_rng(np.random.SeedSequence((seed, rnd)))
        for s in perm_rng.permutation(active):
            s = int(s)
            walk_rng = np.random.default_rng(np.random.SeedSequence((seed, rnd, s)))
            uniforms = walk_rng.random(2 * (L - 1))
            row = rnd * active.size + rank_of[s]
            nodes = _run_walk(graph, s, L, uniforms, node_tables, edge_tables)
            sequences[row] = type_of[nodes]
            starts[row] = s
    return WalkCorpus(sequences, R, L, assignment.num_types, starts)


def generate_node_walks(graph: Graph, params: WalkParams, seed: int = 0,
                        order: str = "auto") -> WalkCorpus:
    """Plain node-id walks: the identity assignment's corpus."""
    return generate_walks(graph, TypeAssignment.identity(graph.num_nodes),
                          params, seed=seed, order=order)


def walk_step_distribution(graph: Graph, current: int, previous: int | None = None,
                           params: WalkParams | None = None):
    """Exact next-step distribution for a walk state.

    Returns (neighbors, probabilities). With no previous node, or with
    unbiased parameters, this is the uniform 1/degree distribution;
    otherwise the normalized second-order bias weights.
    """
    if graph.degrees[current] == 0:
        raise DegenerateNodeError(f"node {current} has no neighbors")
    neighbors = graph.neighbors(current)
    if previous is None or params is None or params.is_unbiased:
        return neighbors, uniform_step_probabilities(graph, current)
    weights = second_order_weights(graph, previous, current, params)
    return neighbors, weights / weights.sum()
