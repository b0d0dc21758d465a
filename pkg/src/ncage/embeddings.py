"""Graph embedding layers: spectral convolution and message passing.

Both map an (N, C) node feature matrix to an (N, F) embedding using the
graph structure. The "gcn" variant propagates through the symmetrically
normalized adjacency with self-loops; the "s2v" variant feeds raw degree
and feature projections into each round of neighbor aggregation.
"""

from dataclasses import dataclass

import numpy as np

from .autodiff import SparseMatrix, Tensor, add, matmul, relu, spmm
from .errors import InvalidParameterError

EMBEDDER_KINDS = ("gcn", "s2v")


@dataclass(frozen=True)
class EmbedderConfig:
    kind: str
    layers: int = 2
    feature_dim: int = 1
    embed_dim: int = 128

    def validated(self):
        if self.kind not in EMBEDDER_KINDS:
            raise InvalidParameterError(f"unknown embedder {self.kind!r}")
        if self.layers < 1:
            raise InvalidParameterError("need at least one layer")
        if self.feature_dim < 1 or self.embed_dim < 1:
            raise InvalidParameterError("dimensions must be positive")
        return self


def glorot_uniform(rng, rows, cols):
    limit = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


def init_embedder_params(config, rng):
    """Fresh weight tensors, keyed by stable names (checkpoint order)."""
    config.validated()
    c, f = config.feature_dim, config.embed_dim
    params = {}
    if config.kind == "gcn":
        dims = [c] + [f] * config.layers
        for i in range(config.layers):
            params[f"embed/layer{i}"] = Tensor(
                glorot_uniform(rng, dims[i], dims[i + 1]), requires_grad=True)
    else:
        params["embed/degree_in"] = Tensor(glorot_uniform(rng, 1, f), requires_grad=True)
        params["embed/feature_in"] = Tensor(glorot_uniform(rng, c, f), requires_grad=True)
        params["embed/neighbor"] = Tensor(glorot_uniform(rng, f, f), requires_grad=True)
    return params


def adjacency_matrix(g):
    """Plain adjacency as a SparseMatrix with unit values."""
    return SparseMatrix(n=g.n, indptr=g.indptr.copy(), indices=g.indices.copy(),
                        data=np.ones(g.indices.shape[0], dtype=np.float64))


def normalized_adjacency(g):
    """D^{-1/2} (A + I) D^{-1/2} with degrees taken after the self-loops."""
    deg = g.degrees() + 1
    inv_sqrt = 1.0 / np.sqrt(deg.astype(np.float64))
    counts = np.diff(g.indptr) + 1  # one self-loop per row
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    data = np.empty(int(indptr[-1]), dtype=np.float64)
    for v in range(g.n):
        row = g.indices[g.indptr[v]:g.indptr[v + 1]]
        # keep the row sorted: neighbors below v, then v, then the rest
        pos = int(np.searchsorted(row, v))
        dst = indptr[v]
        indices[dst:dst + pos] = row[:pos]
        indices[dst + pos] = v
        indices[dst + pos + 1:indptr[v + 1]] = row[pos:]
        data[dst:indptr[v + 1]] = inv_sqrt[v] * inv_sqrt[indices[dst:indptr[v + 1]]]
    return SparseMatrix(n=g.n, indptr=indptr, indices=indices, data=data)


def gcn_forward(params, adj_norm, features, layers):
    """Stacked relu(Â H W) starting from the raw features."""
    h = features
    for i in range(layers):
        h = relu(spmm(adj_norm, matmul(h, params[f"embed/layer{i}"])))
    return h


def s2v_forward(params, adj, degrees, features, layers):
    """Message-passing embedding.

    The degree column and the feature matrix are projected once; their sum
    seeds the embedding and is re-injected at every aggregation round:

        H0     = relu(d W_deg + X W_feat)
        H(l+1) = relu(A H(l) W_nbr + d W_deg + X W_feat)
    """
    x1 = matmul(degrees, params["embed/degree_in"])
    x3 = matmul(features, params["embed/feature_in"])
    base = add(x1, x3)
    h = relu(base)
    for _ in range(layers):
        h = relu(add(spmm(adj, matmul(h, params["embed/neighbor"])), base))
    return h
