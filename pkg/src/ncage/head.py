"""Readout head: embedding rows in, one score per selected node out."""

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, add_scaled, gather_rows, l2_penalty, matmul, mse_loss, relu
from .embeddings import glorot_uniform
from .errors import InvalidParameterError, ShapeError

HEAD_DEPTH = 4  # three relu layers plus the linear output


@dataclass(frozen=True)
class Batch:
    """One training batch: node ids into an embedding plus their targets."""

    node_ids: np.ndarray
    targets: np.ndarray

    def validated(self, n_nodes):
        if self.node_ids.ndim != 1 or self.node_ids.shape[0] == 0:
            raise ShapeError("node_ids must be a non-empty 1-D array")
        if self.targets.shape != (self.node_ids.shape[0],):
            raise ShapeError("targets must align with node_ids")
        if self.node_ids.min() < 0 or self.node_ids.max() >= n_nodes:
            raise InvalidParameterError("batch node id out of range")
        return self


def init_head_params(embed_dim, rng):
    """Three square hidden layers and a single-column output layer."""
    params = {}
    for i in range(HEAD_DEPTH - 1):
        params[f"head/dense{i}"] = Tensor(
            glorot_uniform(rng, embed_dim, embed_dim), requires_grad=True)
    params["head/out"] = Tensor(glorot_uniform(rng, embed_dim, 1), requires_grad=True)
    return params


def head_forward(params, embedding, node_ids):
    """Score the selected embedding rows; returns an (B, 1) tensor."""
    h = gather_rows(embedding, node_ids)
    for i in range(HEAD_DEPTH - 1):
        h = relu(matmul(h, params[f"head/dense{i}"]))
    return matmul(h, params["head/out"])


def training_loss(pred, targets, reg_params, weight_decay):
    """MSE against targets plus weight_decay times the sum of squares."""
    target = Tensor(np.asarray(targets, dtype=np.float64)[:, None])
    loss = mse_loss(pred, target)
    if weight_decay > 0.0 and reg_params:
        loss = add_scaled(loss, l2_penalty(reg_params), weight_decay)
    return loss
