"""Learned approximation of node centrality rankings on graphs.

The package trains a graph-embedding regressor whose only input feature
is each node's degree rank and evaluates how well its outputs reproduce
the ordering induced by expensive exact centralities (betweenness,
closeness, harmonic, eigenvector). Exact algorithms, a two-feature
dense-network baseline, generators, and a Kendall tau-b harness are
included, with hot loops in an optional compiled extension.
"""

from ._kernels import BACKEND
from .centrality import (CENTRALITY_KINDS, betweenness_centrality,
                         closeness_centrality, compute, degree_centrality,
                         eigenvector_centrality, harmonic_centrality,
                         normalize_ranks, power_iteration, rank_vector)
from .checkpoint import Checkpoint, checkpoint_hash
from .checkpoint import load as load_checkpoint
from .checkpoint import save as save_checkpoint
from .errors import (CheckpointError, ConvergenceError, DisconnectedGraphError,
                     EdgeListError, InvalidParameterError, KindMismatchError,
                     NcageError, ShapeError)
from .evaluation import (bench_inference, build_test_sets, edge_ladder,
                         evaluate, kendall_tau_b, linear_fit_r2)
from .graph import (Graph, GeneratorSpec, TOPOLOGIES, connected_components,
                    from_pairs, generate, is_connected, largest_component,
                    load_edge_list, save_edge_list)
from .models import (MODEL_KINDS, BaselineModel, NcaGeModel, create_model,
                     model_from_checkpoint)
from .training import TABLE_DEFAULTS, TrainConfig, build_training_set, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BaselineModel", "CENTRALITY_KINDS", "Checkpoint",
    "CheckpointError", "ConvergenceError", "DisconnectedGraphError",
    "EdgeListError", "GeneratorSpec", "Graph", "InvalidParameterError",
    "KindMismatchError", "MODEL_KINDS", "NcaGeModel", "NcageError",
    "ShapeError", "TABLE_DEFAULTS", "TOPOLOGIES", "TrainConfig",
    "bench_inference", "betweenness_centrality", "build_test_sets",
    "build_training_set", "checkpoint_hash", "closeness_centrality",
    "compute", "connected_components", "create_model", "degree_centrality",
    "edge_ladder", "eigenvector_centrality", "evaluate", "from_pairs",
    "generate", "harmonic_centrality", "is_connected", "kendall_tau_b",
    "largest_component", "linear_fit_r2", "load_checkpoint", "load_edge_list",
    "model_from_checkpoint", "normalize_ranks", "power_iteration",
    "rank_vector", "save_checkpoint", "save_edge_list", "train",
    "__version__",
]
