"""Reference regressor: a small dense network on two rank features.

Each node is summarized by its degree rank and eigenvector-centrality
rank, both mapped to [-1, 1]. Four tanh hidden layers of width 20 with
biases feed a linear output. This is the comparison point for the
embedding models, which see only the degree rank.
"""

import numpy as np

from .autodiff import Tensor, add_rowvec, matmul, tanh
from .centrality import eigenvector_centrality, normalize_ranks
from .embeddings import glorot_uniform

HIDDEN_WIDTH = 20
HIDDEN_LAYERS = 4
FEATURES = 2


def init_baseline_params(rng):
    params = {}
    fan_in = FEATURES
    for i in range(HIDDEN_LAYERS):
        params[f"mlp/dense{i}"] = Tensor(
            glorot_uniform(rng, fan_in, HIDDEN_WIDTH), requires_grad=True)
        params[f"mlp/dense{i}_bias"] = Tensor(
            np.zeros((1, HIDDEN_WIDTH)), requires_grad=True)
        fan_in = HIDDEN_WIDTH
    params["mlp/out"] = Tensor(glorot_uniform(rng, HIDDEN_WIDTH, 1), requires_grad=True)
    params["mlp/out_bias"] = Tensor(np.zeros((1, 1)), requires_grad=True)
    return params


def baseline_features(g):
    """(N, 2) matrix of degree and eigenvector ranks scaled to [-1, 1]."""
    deg = normalize_ranks(g.degrees().astype(np.float64))
    eig = normalize_ranks(eigenvector_centrality(g))
    return np.column_stack((2.0 * deg - 1.0, 2.0 * eig - 1.0))


def baseline_forward(params, features):
    """Apply the network to an (B, 2) feature tensor; returns (B, 1)."""
    h = features
    for i in range(HIDDEN_LAYERS):
        h = tanh(add_rowvec(matmul(h, params[f"mlp/dense{i}"]),
                            params[f"mlp/dense{i}_bias"]))
    return add_rowvec(matmul(h, params["mlp/out"]), params["mlp/out_bias"])
