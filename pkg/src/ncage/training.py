"""Training loop with a fully derandomized data order.

Every source of randomness is derived from (seed, epoch, graph index)
through named SeedSequence streams, so the position in the data schedule
is a pure function of the step counter. That is what makes checkpoint
resume exact: no iterator state needs to be serialized, only the step
count, weights, optimizer moments, and current learning rate.

One step = one node fed to the model. Batches never mix graphs; a graph
whose node permutation is exhausted yields a final short batch.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import checkpoint as ckpt_io
from .autodiff import AdamState, adam_step, clip_gradients, zero_grad
from .centrality import compute, normalize_ranks
from .errors import CheckpointError, ConvergenceError, InvalidParameterError
from .graph import GeneratorSpec, generate, is_connected, largest_component, load_edge_list
from .head import training_loss
from .models import create_model, load_weights, model_from_config

log = logging.getLogger(__name__)

# per-model defaults; anything left as None on TrainConfig is filled from here
TABLE_DEFAULTS = {
    "gcn": dict(eta=0.001, eta_decay=0.999, eta_min=0.0001, weight_decay=0.01,
                layers=2, feature_dim=1, embed_dim=128, batch_size=128,
                steps=4_000_000),
    "s2v": dict(eta=0.001, eta_decay=0.999, eta_min=0.0001, weight_decay=0.1,
                layers=2, feature_dim=1, embed_dim=128, batch_size=128,
                steps=4_000_000),
    "baseline": dict(eta=0.01, eta_decay=0.999, eta_min=0.0001, weight_decay=0.001,
                     layers=None, feature_dim=2, embed_dim=None, batch_size=128,
                     steps=1_000_000),
}

# stream tags keeping the derived SeedSequences disjoint
_GRAPH_ORDER_STREAM = 101
_NODE_ORDER_STREAM = 202


@dataclass(frozen=True)
class TrainConfig:
    model: str
    centrality: str
    seed: int = 0
    data_seed: int = 7
    steps: int = None
    batch_size: int = None
    eta: float = None
    eta_decay: float = None
    eta_min: float = None
    weight_decay: float = None
    layers: int = None
    feature_dim: int = None
    embed_dim: int = None
    num_graphs: int = 1000
    min_nodes: int = 100
    max_nodes: int = 1000
    graphs_dir: str = None        # train on edge lists from here instead of generating
    checkpoint_interval: int = None

    def resolved(self):
        """Fill None fields from the per-model defaults and validate."""
        if self.model not in TABLE_DEFAULTS:
            raise InvalidParameterError(f"unknown model {self.model!r}")
        if self.model == "baseline" and (self.layers is not None
                                         or self.embed_dim is not None):
            raise InvalidParameterError(
                "baseline has a fixed architecture; layers/embed_dim do not apply")
        defaults = TABLE_DEFAULTS[self.model]
        updates = {k: v for k, v in defaults.items()
                   if getattr(self, k) is None}
        cfg = replace(self, **updates)
        if cfg.steps < 1:
            raise InvalidParameterError("steps must be positive")
        if cfg.batch_size < 1:
            raise InvalidParameterError("batch_size must be positive")
        if not 0.0 < cfg.eta:
            raise InvalidParameterError("eta must be positive")
        if not 0.0 < cfg.eta_decay <= 1.0:
            raise InvalidParameterError("eta_decay must be in (0, 1]")
        if cfg.weight_decay < 0.0:
            raise InvalidParameterError("weight_decay must be non-negative")
        if cfg.graphs_dir is None:
            if cfg.num_graphs < 1:
                raise InvalidParameterError("num_graphs must be positive")
            if not 2 <= cfg.min_nodes <= cfg.max_nodes:
                raise InvalidParameterError("need 2 <= min_nodes <= max_nodes")
        if cfg.checkpoint_interval is not None and cfg.checkpoint_interval < 1:
            raise InvalidParameterError("checkpoint_interval must be positive")
        return cfg

    def rng_blob(self):
        """Data-order bookkeeping stored in checkpoints."""
        return {"scheme": "seeded-epoch-perms-v1", "seed": self.seed,
                "data_seed": self.data_seed, "num_graphs": self.num_graphs,
                "min_nodes": self.min_nodes, "max_nodes": self.max_nodes,
                "batch_size": self.batch_size, "steps": self.steps,
                "eta0": self.eta, "eta_decay": self.eta_decay,
                "eta_min": self.eta_min, "weight_decay": self.weight_decay,
                "graphs_dir": self.graphs_dir}


@dataclass(frozen=True)
class TrainingExample:
    graph: object
    prepared: object
    targets: np.ndarray


def _make_example(model, centrality, g):
    if not is_connected(g):
        g = largest_component(g)
    ranks = normalize_ranks(compute(centrality, g).values)
    return TrainingExample(graph=g, prepared=model.prepare(g),
                           targets=model.targets_from_ranks(ranks))


def _training_graph(config, index):
    rng = np.random.default_rng(np.random.SeedSequence((config.data_seed, index)))
    n = int(rng.integers(config.min_nodes, config.max_nodes + 1))
    gseed = int(rng.integers(0, 2 ** 62))
    return generate(GeneratorSpec(topology="sf", n=n, m=2, seed=gseed))


def build_training_set(config, model, workers=0):
    """Generate (or load) the corpus and precompute targets and layouts.

    Deterministic in config regardless of workers: parallelism only fans
    out the per-graph work, each of which is self-seeded.
    """
    if config.graphs_dir is not None:
        names = sorted(f for f in os.listdir(config.graphs_dir)
                       if not f.startswith("."))
        if not names:
            raise InvalidParameterError(f"no edge lists in {config.graphs_dir}")
        graphs = [load_edge_list(os.path.join(config.graphs_dir, f)) for f in names]
    else:
        graphs = [_training_graph(config, i) for i in range(config.num_graphs)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda g: _make_example(model, config.centrality, g),
                                 graphs))
    return [_make_example(model, config.centrality, g) for g in graphs]


def _graph_order(seed, epoch, count):
    rng = np.random.default_rng(
        np.random.SeedSequence((seed, _GRAPH_ORDER_STREAM, epoch)))
    return rng.permutation(count)


def _node_order(seed, epoch, graph_index, n):
    rng = np.random.default_rng(
        np.random.SeedSequence((seed, _NODE_ORDER_STREAM, epoch, graph_index)))
    return rng.permutation(n)


def _schedule(config, sizes, start_step, total_steps):
    """Yield (example_index, node_ids, step_after) from start_step on.

    Pure arithmetic over the seeded permutations; start_step must fall on
    a batch boundary (it always does for checkpoints written by train).
    """
    bsz = config.batch_size
    count = len(sizes)
    step = 0
    epoch = 0
    while step < total_steps:
        order = _graph_order(config.seed, epoch, count)
        for slot in range(count):
            gi = int(order[slot])
            size = sizes[gi]
            if step + size <= start_step:
                step += size
                continue
            perm = _node_order(config.seed, epoch, gi, size)
            offset = 0
            while offset < size and step < total_steps:
                take = min(bsz, size - offset, total_steps - step)
                if step + take <= start_step:
                    step += take
                    offset += take
                    continue
                if step < start_step:
                    raise CheckpointError(
                        f"resume step {start_step} is not on a batch boundary")
                ids = perm[offset:offset + take]
                step += take
                offset += take
                yield gi, ids, step
            if step >= total_steps:
                return
        epoch += 1


def _snapshot(config, model, adam, step, eta):
    params = model.parameters()
    return ckpt_io.Checkpoint(
        config=model.config_dict(), step=step, eta=eta, adam_t=adam.t,
        weights={k: p.data.copy() for k, p in params.items()},
        adam_m={k: m.copy() for k, m in adam.m.items()},
        adam_v={k: v.copy() for k, v in adam.v.items()},
        rng=config.rng_blob())


def _restore(config, resume_from):
    if resume_from.rng != config.rng_blob():
        raise CheckpointError("checkpoint data-order settings differ from config")
    model = model_from_config(resume_from.config, seed=config.seed)
    load_weights(model, resume_from.weights)
    adam = AdamState.for_params(model.parameters())
    for name in adam.m:
        if name not in resume_from.adam_m:
            raise CheckpointError(f"optimizer state missing for {name}")
        adam.m[name] = resume_from.adam_m[name].copy()
        adam.v[name] = resume_from.adam_v[name].copy()
    adam.t = resume_from.adam_t
    return model, adam, resume_from.step, resume_from.eta


def train(config, resume_from=None, on_batch=None, checkpoint_dir=None,
          workers=0, training_set=None):
    """Run (or continue) a training job; returns the final Checkpoint.

    on_batch(step, loss, eta) fires after every optimizer update with the
    loss of that batch and the decayed learning rate. checkpoint_dir plus
    config.checkpoint_interval writes numbered intermediate checkpoints.
    training_set overrides corpus construction (it must match config).
    """
    config = config.resolved()
    if resume_from is not None:
        model, adam, start_step, eta = _restore(config, resume_from)
    else:
        model = create_model(config.model, config.centrality, config.seed,
                             **_arch_overrides(config))
        adam = AdamState.for_params(model.parameters())
        start_step, eta = 0, config.eta
    if start_step >= config.steps:
        return _snapshot(config, model, adam, start_step, eta)

    if training_set is None:
        training_set = build_training_set(config, model, workers=workers)
    sizes = [ex.graph.n for ex in training_set]
    params = model.parameters()
    reg = model.regularized()
    interval = config.checkpoint_interval
    last_mark = start_step // interval if interval else 0

    for gi, node_ids, step in _schedule(config, sizes, start_step, config.steps):
        ex = training_set[gi]
        zero_grad(params)
        pred = model.forward(ex.prepared, node_ids)
        loss = training_loss(pred, ex.targets[node_ids], reg, config.weight_decay)
        value = float(loss.data[0, 0])
        if not np.isfinite(value):
            raise ConvergenceError(f"non-finite loss at step {step}")
        loss.backward()
        clip_gradients(params)
        adam_step(params, adam, eta)
        eta = max(eta * config.eta_decay, config.eta_min)
        if on_batch is not None:
            on_batch(step, value, eta)
        if interval and checkpoint_dir and step // interval > last_mark:
            last_mark = step // interval
            snap = _snapshot(config, model, adam, step, eta)
            ckpt_io.save(snap, os.path.join(checkpoint_dir,
                                            f"step{step:012d}.ckpt"))
    return _snapshot(config, model, adam, config.steps, eta)


def _arch_overrides(config):
    if config.model == "baseline":
        return {}
    return {"layers": config.layers, "feature_dim": config.feature_dim,
            "embed_dim": config.embed_dim}
