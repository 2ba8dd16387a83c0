"""typewalk: graph embeddings from type-labeled random walks.

Nodes are mapped to a small set of structural types (from binned motif
counts or factorized features), random walks emit type sequences instead
of node ids, and a skip-gram model with negative sampling embeds the
types. Storage is proportional to the number of types, not nodes, and the
type map extends to unseen nodes. A link-prediction harness and exact
random-walk diagnostics round out the toolkit.
"""
from importlib import resources as _resources

__version__ = "0.1.0"

from .analysis import (AccessTimeReport, EdgeVisitReport, FirstPassageTable,
                       NeighborBoundReport, check_access_time,
                       check_edge_visits, check_first_passage_bound,
                       exact_first_passage, first_passage_to, hitting_times,
                       stationary_residual, transition_matrix)
from .embedding import (EmbeddingModel, TrainConfig, sgns_gradients,
                        sgns_objective, softmax_prob, softmax_row, train,
                        train_with_trace)
from .evaluation import (EdgeSplit, EvalReport, LRModel, auc, edge_features,
                         evaluate_pipeline, score_split, select_l2,
                         split_edges, train_lr)
from .graph import (AliasTable, Graph, WalkParams, build_alias,
                    build_first_order, build_second_order,
                    connected_components, is_connected, load_edge_list,
                    save_edge_list)
from .motifs import (MOTIF_LABELS, BinnedMatrix, FeatureMatrix, bin_features,
                     brute_force_motifs, count_motifs, ingest_attributes,
                     log_bin)
from .pipeline import (FEATURE_SUBSET_GRID, EmbedResult, PhiConfig,
                       build_assignment, embed_graph)
from .typemap import (FactorModel, KMeansResult, TypeAssignment, factorize,
                      kmeans, phi_concat, phi_factorized)
from .walks import (WalkCorpus, generate_node_walks, generate_walks,
                    walk_step_distribution)


def bundled_dataset(name: str = "social62") -> str:
    """Filesystem path of a packaged example edge list."""
    return str(_resources.files(__name__) / "data" / f"{name}.edges")
