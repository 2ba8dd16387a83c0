"""Exact and Monte-Carlo diagnostics of uniform random walks.

Covers the quantities the walk corpus construction leans on: one-step
transition matrices, first-passage probabilities (how soon a walk from u
first reaches v), expected hitting times with the Markov tail bound, and
the expected number of directed edge traversals when d_u walks start from
every node u.

Exact quantities come from taboo/absorbing linear algebra on dense
matrices; they are intended for graphs up to a few hundred nodes, with
Monte-Carlo estimators for anything larger.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNodeError, ParameterError
from .graph import Graph, is_connected


def transition_matrix(graph: Graph) -> np.ndarray:
    """Dense one-step matrix: P[i, j] = 1/d_i when (i, j) is an edge, else 0."""
    n = graph.num_nodes
    P = np.zeros((n, n))
    for i in range(n):
        nb = graph.neighbors(i)
        if nb.size:
            P[i, nb] = 1.0 / nb.size
    return P


def stationary_residual(graph: Graph) -> float:
    """max |(1 D) P - (1 D)|: the degree vector is stationary (unnormalized)."""
    P = transition_matrix(graph)
    d = graph.degrees.astype(np.float64)
    return float(np.max(np.abs(d @ P - d)))


@dataclass
class FirstPassageTable:
    """r[t, j]: probability the first visit to j from ``start`` is at time t."""

    start: int
    horizon: int
    r: np.ndarray


def first_passage_to(graph: Graph, target: int, horizon: int) -> np.ndarray:
    """r[t, u] for all starts u: first visit to ``target`` happens at time t.

    Taboo recursion: col_1 = P[:, target]; col_t = Q col_{t-1} with Q the
    transition matrix with the target column zeroed. Row t = 0 is zero.
    """
    if horizon < 1:
        raise ParameterError("horizon must be >= 1")
    P = transition_matrix(graph)
    q = P.copy()
    q[:, target] = 0.0
    out = np.zeros((horizon + 1, graph.num_nodes))
    col = P[:, target].copy()
    out[1] = col
    for t in range(2, horizon + 1):
        col = q @ col
        out[t] = col
    return out


def exact_first_passage(graph: Graph, start: int, horizon: int) -> FirstPassageTable:
    """First-passage probabilities from ``start`` to every target, t <= horizon."""
    if graph.degrees[start] == 0:
        raise DegenerateNodeError(f"start node {start} is isolated")
    n = graph.num_nodes
    r = np.zeros((horizon + 1, n))
    for j in range(n):
        r[:, j] = first_passage_to(graph, j, horizon)[:, start]
    return FirstPassageTable(start, horizon, r)


def hitting_times(graph: Graph, target: int) -> np.ndarray:
    """Expected steps to first reach ``target`` from every node (exact solve).

    Requires a connected graph; otherwise some hitting times are infinite
    and the linear system is singular.
    """
    if not is_connected(graph):
        raise ParameterError("hitting times need a connected graph")
    n = graph.num_nodes
    A = np.eye(n) - transition_matrix(graph)
    A[target, :] = 0.0
    A[target, target] = 1.0
    b = np.ones(n)
    b[target] = 0.0
    return np.linalg.solve(A, b)


def _require_nonadjacent_pair(graph: Graph, u: int, v: int) -> None:
    if u == v:
        raise ParameterError("u and v must differ")
    if graph.has_edge(u, v):
        raise ParameterError(f"({u}, {v}) must be non-adjacent")
    if not is_connected(graph):
        raise ParameterError("graph must be connected")


@dataclass
class NeighborBoundReport:
    """First-passage mean identity at (u, v, t) plus a dominating neighbor."""

    u: int
    v: int
    t: int
    r_uv_t: float
    neighbor_mean: float
    identity_error: float
    witness: int
    witness_value: float
    margin: float
    passed: bool


def check_first_passage_bound(graph: Graph, u: int, v: int, t: int,
                              tol: float = 1e-10) -> NeighborBoundReport:
    """Verify r_uv^t equals the mean of r_jv^{t-1} over u's neighbors.

    Conditioning on the first step gives the identity exactly; it implies
    some neighbor j reaches v no later, i.e. r_uv^t <= r_jv^{t-1}. The
    returned witness is the maximizing neighbor.
    """
    _require_nonadjacent_pair(graph, u, v)
    if t < 2:
        raise ParameterError("need t >= 2 for a non-adjacent pair")
    table = first_passage_to(graph, v, t)
    nb = graph.neighbors(u)
    r_uv = float(table[t, u])
    neighbor_vals = table[t - 1, nb]
    mean = float(neighbor_vals.mean())
    w = int(np.argmax(neighbor_vals))
    err = abs(r_uv - mean)
    return NeighborBoundReport(u, v, t, r_uv, mean, err, int(nb[w]),
                               float(neighbor_vals[w]),
                               float(neighbor_vals[w] - r_uv), err <= tol)


@dataclass
class AccessTimeReport:
    """Hitting-time identity and the Markov tail bound at 2 * h_uv."""

    u: int
    v: int
    h_uv: float
    neighbor_average: float
    identity_error: float
    threshold: float
    empirical_prob: float
    sigma: float
    trials: int
    passed: bool


def _simulate_no_hit_fraction(graph: Graph, start: int, target: int, steps: int,
                              trials: int, rng: np.random.Generator) -> float:
    """Fraction of walks from ``start`` that avoid ``target`` for ``steps`` steps."""
    cur = np.full(trials, start, dtype=np.int64)
    alive = np.ones(trials, dtype=bool)
    indptr, indices, deg = graph.indptr, graph.indices, graph.degrees
    for _ in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        nodes = cur[idx]
        offs = (rng.random(idx.size) * deg[nodes]).astype(np.int64)
        nxt = indices[indptr[nodes] + offs]
        cur[idx] = nxt
        alive[idx] &= nxt != target
    return float(alive.mean())


def check_access_time(graph: Graph, u: int, v: int, trials: int = 10_000,
                      seed: int = 0, tol: float = 1e-10) -> AccessTimeReport:
    """Exact h_uv = 1 + average neighbor hitting time, plus the tail bound.

    Monte-Carlo estimates Pr(first visit time >= 2 h_uv), which Markov's
    inequality caps at 1/2; the check allows three standard errors.
    """
    _require_nonadjacent_pair(graph, u, v)
    h = hitting_times(graph, v)
    h_uv = float(h[u])
    neighbor_avg = float(h[graph.neighbors(u)].mean())
    identity_error = abs(h_uv - 1.0 - neighbor_avg)
    threshold = 2.0 * h_uv
    steps = int(math.ceil(threshold)) - 1  # t >= threshold iff no hit within these
    rng = np.random.default_rng(np.random.SeedSequence((seed, 33)))
    p_hat = _simulate_no_hit_fraction(graph, u, v, steps, trials, rng)
    sigma = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / trials)
    passed = identity_error <= tol and p_hat <= 0.5 + 3.0 * sigma
    return AccessTimeReport(u, v, h_uv, neighbor_avg, identity_error,
                            threshold, p_hat, sigma, trials, passed)


@dataclass
class EdgeVisitReport:
    """Directed traversal counts when d_u walks of length L start at every u.

    With that start measure the degree vector is stationary, so each
    directed edge expects exactly L traversals; the bound is checked per
    directed edge within three standard errors. Undirected totals (both
    directions summed) are reported against 2L.
    """

    walk_length: int
    trials: int
    edges: np.ndarray
    directed_means: np.ndarray
    directed_sigmas: np.ndarray
    undirected_means: np.ndarray = field(repr=False)
    bound: float = 0.0
    passed: bool = False


def check_edge_visits(graph: Graph, walk_length: int, trials: int = 1000,
                      seed: int = 0) -> EdgeVisitReport:
    """Simulate the stationary walk ensemble and tally directed traversals.

    Trials are simulated in vectorized blocks of at most ~2M concurrent
    walks; the block size is fixed so results are seed-deterministic.
    """
    if walk_length < 1:
        raise ParameterError("walk_length must be >= 1")
    if not is_connected(graph):
        raise ParameterError("edge-visit check expects a connected graph")
    indptr, indices, deg = graph.indptr, graph.indices, graph.degrees
    n_dir = indices.size
    starts = np.repeat(np.arange(graph.num_nodes, dtype=np.int64), deg)
    walks_per_trial = starts.size  # sum of degrees = one walk per directed edge
    rng = np.random.default_rng(np.random.SeedSequence((seed, 44)))
    counts = np.zeros((trials, n_dir), dtype=np.int64)
    block = max(1, 2_000_000 // walks_per_trial)
    for t0 in range(0, trials, block):
        b = min(block, trials - t0)
        cur = np.tile(starts, b)
        base = np.repeat(np.arange(b, dtype=np.int64), walks_per_trial) * n_dir
        acc = np.zeros(b * n_dir, dtype=np.int64)
        for _ in range(walk_length):
            offs = (rng.random(cur.size) * deg[cur]).astype(np.int64)
            slots = indptr[cur] + offs  # slot identifies the directed edge taken
            acc += np.bincount(base + slots, minlength=b * n_dir)
            cur = indices[slots]
        counts[t0:t0 + b] = acc.reshape(b, n_dir)
    means = counts.mean(axis=0)
    sigmas = counts.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 \
        else np.zeros(n_dir)
    src, dst = starts, indices
    # slots are sorted by (src, dst); re-sorting by (dst, src) lands each
    # slot on the position of its reversed twin
    reverse = np.lexsort((src, dst))
    undirected = means + means[reverse]
    passed = bool(np.all(means <= walk_length + 3.0 * sigmas))
    edges = np.stack([src, dst], axis=1)
    return EdgeVisitReport(walk_length, trials, edges, means, sigmas,
                           undirected, float(walk_length), passed)
