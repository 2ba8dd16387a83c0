"""End-to-end wiring: features -> types -> walks -> embedding.

Shared by the command-line front end and the link-prediction harness so
both run exactly the same stages. Sub-stage seeds derive from one master
seed, keeping a whole run reproducible from a single integer.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingModel, TrainConfig, train
from .errors import ParameterError
from .graph import Graph, WalkParams
from .motifs import FeatureMatrix, bin_features, count_motifs, ingest_attributes
from .typemap import TypeAssignment, phi_concat, phi_factorized
from .walks import WalkCorpus, generate_walks

log = logging.getLogger(__name__)

PHI_KINDS = ("concat", "factorized", "identity", "external")

# default search list of feature subsets for sweeps (ours, CLI-overridable)
FEATURE_SUBSET_GRID = (
    ("x1",),
    ("x2", "x3"),
    ("x1", "x2", "x3"),
    ("x1", "x3"),
    ("x2", "x3", "x4", "x6", "x9"),
    ("x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"),
    ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"),
    ("x3", "x8", "x9"),
    ("x1", "x4", "x7"),
    ("x1", "x2", "x3", "x5", "x6"),
)


def subseed(seed: int, tag: int) -> int:
    """Stable derived seed for a pipeline stage."""
    return int(np.random.SeedSequence((seed, tag)).generate_state(1)[0])


@dataclass(frozen=True)
class PhiConfig:
    """How nodes get their types.

    kind "concat" keys types on the binned feature tuple, "factorized"
    clusters low-rank node factors into ``num_types`` groups, "identity"
    gives every node its own type, and "external" loads a node->type TSV.
    """

    kind: str = "concat"
    features: tuple = ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9")
    delta: float = 0.5
    bin_op: str = "concat"
    rank: int = 10
    num_types: int = 16
    attributes_path: str | None = None
    assignment_path: str | None = None

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise ParameterError(f"unknown phi kind {self.kind!r}")
        if self.kind == "external" and not self.assignment_path:
            raise ParameterError("external phi needs assignment_path")
        object.__setattr__(self, "features", tuple(self.features) if self.features else ())


def node_features(graph: Graph, cfg: PhiConfig) -> FeatureMatrix:
    """Motif counts, with external attribute columns appended when given."""
    feats = count_motifs(graph)
    if cfg.attributes_path:
        feats = feats.hstack(ingest_attributes(cfg.attributes_path, graph))
    return feats


def build_assignment(graph: Graph, cfg: PhiConfig, seed: int = 0) -> TypeAssignment:
    """Produce the type assignment assumed by walks and the embedding."""
    if cfg.kind == "identity":
        return TypeAssignment.identity(graph.num_nodes)
    if cfg.kind == "external":
        return TypeAssignment.read_tsv(cfg.assignment_path, graph)
    feats = node_features(graph, cfg)
    selected = feats.select(cfg.features) if cfg.features else feats
    binned = bin_features(selected, cfg.delta)
    if cfg.kind == "concat":
        return phi_concat(binned, op=cfg.bin_op)
    m = min(cfg.num_types, graph.num_nodes)
    if m < cfg.num_types:
        log.warning("num_types clamped to node count %d", m)
    return phi_factorized(binned.values.astype(np.float64), cfg.rank, m, seed=seed)


@dataclass
class EmbedResult:
    assignment: TypeAssignment
    corpus: WalkCorpus
    model: EmbeddingModel
    timings_ms: dict = field(default_factory=dict)

    @property
    def num_types(self) -> int:
        return self.assignment.num_types

    def storage_bytes(self) -> int:
        """Embedding rows plus the node -> type table."""
        return self.model.nbytes() + self.assignment.type_of.nbytes


def embed_graph(graph: Graph, phi: PhiConfig, walk_params: WalkParams,
                train_config: TrainConfig, seed: int = 0, order: str = "auto") -> EmbedResult:
    """Run typing, walk generation and training on one graph."""
    timings = {}
    t0 = time.perf_counter()
    assignment = build_assignment(graph, phi, seed=subseed(seed, 1))
    timings["phi"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    corpus = generate_walks(graph, assignment, walk_params,
                            seed=subseed(seed, 2), order=order)
    timings["walks"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    cfg = TrainConfig(dims=train_config.dims, window=train_config.window,
                      negatives=train_config.negatives, eta0=train_config.eta0,
                      epochs=train_config.epochs, seed=subseed(seed, 3))
    model = train(corpus, assignment.num_types, cfg)
    timings["train"] = (time.perf_counter() - t0) * 1e3
    return EmbedResult(assignment, corpus, model, timings)
