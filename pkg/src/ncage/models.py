"""Model objects: construction, per-graph preparation, forward, predict.

Two families share one interface. The embedding models ("gcn", "s2v")
see a single input feature per node, its normalized degree rank, and
learn rank targets in [0, 1]. The baseline sees degree and eigenvector
ranks scaled to [-1, 1] and learns targets on the same scale, so its raw
outputs are mapped back to [0, 1] for comparison.
"""

from dataclasses import dataclass

import numpy as np

from . import baseline as _mlp
from .autodiff import Tensor, gather_rows, no_grad
from .centrality import CENTRALITY_KINDS, normalize_ranks
from .embeddings import (EmbedderConfig, adjacency_matrix, gcn_forward,
                         init_embedder_params, normalized_adjacency, s2v_forward)
from .errors import InvalidParameterError, ShapeError
from .head import head_forward, init_head_params

MODEL_KINDS = ("gcn", "s2v", "baseline")


@dataclass(frozen=True)
class PreparedGraph:
    """Everything forward() needs for one graph, computed once."""

    graph: object
    features: Tensor
    adj: object = None
    degrees: Tensor = None


def _check_kinds(model_kind, centrality):
    if model_kind not in MODEL_KINDS:
        raise InvalidParameterError(f"unknown model kind {model_kind!r}")
    if centrality not in CENTRALITY_KINDS:
        raise InvalidParameterError(f"unknown centrality {centrality!r}")


class NcaGeModel:
    """Embedding model plus readout head."""

    def __init__(self, kind, centrality, config, params):
        self.kind = kind
        self.centrality = centrality
        self.config = config
        self.params = params

    @classmethod
    def create(cls, kind, centrality, seed, layers=2, feature_dim=1, embed_dim=128):
        _check_kinds(kind, centrality)
        config = EmbedderConfig(kind=kind, layers=layers,
                                feature_dim=feature_dim, embed_dim=embed_dim).validated()
        rng = np.random.default_rng(seed)
        params = init_embedder_params(config, rng)
        params.update(init_head_params(embed_dim, rng))
        return cls(kind, centrality, config, params)

    def parameters(self):
        return self.params

    def regularized(self):
        """Weight matrices subject to the L2 penalty (biases excluded)."""
        return [p for name, p in sorted(self.params.items()) if "bias" not in name]

    def config_dict(self):
        return {"model": self.kind, "centrality": self.centrality,
                "layers": self.config.layers, "feature_dim": self.config.feature_dim,
                "embed_dim": self.config.embed_dim}

    def prepare(self, g):
        ranks = normalize_ranks(g.degrees().astype(np.float64))
        features = Tensor(np.tile(ranks[:, None], (1, self.config.feature_dim)))
        if self.kind == "gcn":
            return PreparedGraph(graph=g, features=features, adj=normalized_adjacency(g))
        return PreparedGraph(graph=g, features=features, adj=adjacency_matrix(g),
                             degrees=Tensor(g.degrees().astype(np.float64)[:, None]))

    def forward(self, prepared, node_ids):
        if self.kind == "gcn":
            emb = gcn_forward(self.params, prepared.adj, prepared.features,
                              self.config.layers)
        else:
            emb = s2v_forward(self.params, prepared.adj, prepared.degrees,
                              prepared.features, self.config.layers)
        return head_forward(self.params, emb, node_ids)

    def targets_from_ranks(self, ranks):
        return np.asarray(ranks, dtype=np.float64)

    def to_rank01(self, raw):
        return np.asarray(raw, dtype=np.float64)

    def predict(self, g):
        """Approximate rank score per node, higher means more central."""
        prepared = self.prepare(g)
        with no_grad():
            out = self.forward(prepared, np.arange(g.n, dtype=np.int64))
        return self.to_rank01(out.data[:, 0])


class BaselineModel:
    """Dense network on two per-node rank features."""

    kind = "baseline"

    def __init__(self, centrality, params):
        self.centrality = centrality
        self.params = params

    @classmethod
    def create(cls, centrality, seed):
        _check_kinds("baseline", centrality)
        rng = np.random.default_rng(seed)
        return cls(centrality, _mlp.init_baseline_params(rng))

    def parameters(self):
        return self.params

    def regularized(self):
        return [p for name, p in sorted(self.params.items()) if "bias" not in name]

    def config_dict(self):
        return {"model": "baseline", "centrality": self.centrality}

    def prepare(self, g):
        return PreparedGraph(graph=g, features=Tensor(_mlp.baseline_features(g)))

    def forward(self, prepared, node_ids):
        rows = gather_rows(prepared.features, node_ids)
        return _mlp.baseline_forward(self.params, rows)

    def targets_from_ranks(self, ranks):
        # tanh-range targets
        return 2.0 * np.asarray(ranks, dtype=np.float64) - 1.0

    def to_rank01(self, raw):
        return (np.asarray(raw, dtype=np.float64) + 1.0) / 2.0

    def predict(self, g):
        prepared = self.prepare(g)
        with no_grad():
            out = self.forward(prepared, np.arange(g.n, dtype=np.int64))
        return self.to_rank01(out.data[:, 0])


def create_model(kind, centrality, seed, **overrides):
    if kind == "baseline":
        if overrides:
            raise InvalidParameterError("baseline takes no architecture overrides")
        return BaselineModel.create(centrality, seed)
    return NcaGeModel.create(kind, centrality, seed, **overrides)


def expected_param_shapes(config):
    """name -> (rows, cols) for every weight the model kind owns."""
    kind = config["model"]
    shapes = {}
    if kind == "baseline":
        fan_in = _mlp.FEATURES
        for i in range(_mlp.HIDDEN_LAYERS):
            shapes[f"mlp/dense{i}"] = (fan_in, _mlp.HIDDEN_WIDTH)
            shapes[f"mlp/dense{i}_bias"] = (1, _mlp.HIDDEN_WIDTH)
            fan_in = _mlp.HIDDEN_WIDTH
        shapes["mlp/out"] = (_mlp.HIDDEN_WIDTH, 1)
        shapes["mlp/out_bias"] = (1, 1)
        return shapes
    c, f, layers = config["feature_dim"], config["embed_dim"], config["layers"]
    if kind == "gcn":
        dims = [c] + [f] * layers
        for i in range(layers):
            shapes[f"embed/layer{i}"] = (dims[i], dims[i + 1])
    else:
        shapes["embed/degree_in"] = (1, f)
        shapes["embed/feature_in"] = (c, f)
        shapes["embed/neighbor"] = (f, f)
    for i in range(3):
        shapes[f"head/dense{i}"] = (f, f)
    shapes["head/out"] = (f, 1)
    return shapes


def model_from_config(config, seed=0):
    """Fresh model matching a config dict (as stored in checkpoints)."""
    kind = config["model"]
    if kind == "baseline":
        return BaselineModel.create(config["centrality"], seed)
    return NcaGeModel.create(kind, config["centrality"], seed,
                             layers=config["layers"], feature_dim=config["feature_dim"],
                             embed_dim=config["embed_dim"])


def model_from_checkpoint(ckpt):
    """Rebuild a model and install the weights stored in a checkpoint."""
    return load_weights(model_from_config(ckpt.config), ckpt.weights)


def load_weights(model, weights):
    """Overwrite model parameters from a name -> array mapping."""
    expected = expected_param_shapes(model.config_dict())
    if set(weights) != set(expected):
        missing = set(expected) - set(weights)
        extra = set(weights) - set(expected)
        raise ShapeError(f"weight names mismatch (missing={sorted(missing)}, "
                         f"unexpected={sorted(extra)})")
    for name, arr in weights.items():
        if arr.shape != expected[name]:
            raise ShapeError(f"{name}: expected {expected[name]}, got {arr.shape}")
        model.params[name].data = np.array(arr, dtype=np.float64)
    return model
