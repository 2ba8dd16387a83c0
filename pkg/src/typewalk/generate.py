"""Deterministic graph generators used by tests, demos and benchmarks."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .graph import Graph, is_connected


def path_graph(n: int) -> Graph:
    return Graph.from_edges([(i, i + 1) for i in range(n - 1)], num_nodes=n)


def cycle_graph(n: int) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Graph.from_edges(edges, num_nodes=n)


def star_graph(n_leaves: int) -> Graph:
    return Graph.from_edges([(0, i) for i in range(1, n_leaves + 1)], num_nodes=n_leaves + 1)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], num_nodes=n)


def empty_graph(n: int) -> Graph:
    return Graph.from_edges([], num_nodes=n)


def erdos_renyi(n: int, p: float, seed: int = 0, ensure_connected: bool = False,
                max_tries: int = 200) -> Graph:
    """G(n, p) sample; optionally resample until connected."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError("edge probability must be in [0, 1]")
    for attempt in range(max_tries):
        rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
        iu, iv = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        g = Graph.from_edges(np.stack([iu[keep], iv[keep]], axis=1), num_nodes=n)
        if not ensure_connected or is_connected(g):
            return g
    raise ParameterError(f"no connected G({n}, {p}) sample in {max_tries} tries")


def barabasi_albert(n: int, attach: int = 2, seed: int = 0) -> Graph:
    """Preferential-attachment graph with a heavy-tailed degree sequence."""
    if attach < 1 or n <= attach:
        raise ParameterError("need n > attach >= 1")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(attach + 1) for j in range(i + 1, attach + 1)]
    repeated: list[int] = [u for e in edges for u in e]
    for v in range(attach + 1, n):
        targets: set[int] = set()
        while len(targets) < attach:
            targets.add(int(repeated[rng.integers(0, len(repeated))]))
        for t in targets:
            edges.append((v, t))
            repeated.extend((v, t))
    return Graph.from_edges(edges, num_nodes=n)
