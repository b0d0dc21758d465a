import numpy as np
import pytest

from ncage.autodiff import Tensor
from ncage.baseline import baseline_features
from ncage.embeddings import EmbedderConfig, normalized_adjacency
from ncage.errors import InvalidParameterError, ShapeError
from ncage.graph import GeneratorSpec, from_pairs, generate
from ncage.head import Batch
from ncage.models import (
    create_model,
    expected_param_shapes,
    load_weights,
    model_from_config,
)


def test_expected_param_shapes_gcn():
    shapes = expected_param_shapes({"model": "gcn", "centrality": "closeness",
                                    "layers": 2, "feature_dim": 1, "embed_dim": 16})
    assert shapes["embed/layer0"] == (1, 16)
    assert shapes["embed/layer1"] == (16, 16)
    assert shapes["head/dense0"] == (16, 16)
    assert shapes["head/out"] == (16, 1)
    assert len(shapes) == 2 + 4


def test_expected_param_shapes_s2v():
    shapes = expected_param_shapes({"model": "s2v", "centrality": "closeness",
                                    "layers": 2, "feature_dim": 3, "embed_dim": 8})
    assert shapes["embed/degree_in"] == (1, 8)
    assert shapes["embed/feature_in"] == (3, 8)
    assert shapes["embed/neighbor"] == (8, 8)
    assert len(shapes) == 3 + 4


def test_expected_param_shapes_baseline():
    shapes = expected_param_shapes({"model": "baseline", "centrality": "closeness"})
    assert shapes["mlp/dense0"] == (2, 20)
    assert shapes["mlp/dense3"] == (20, 20)
    assert shapes["mlp/out"] == (20, 1)
    assert shapes["mlp/out_bias"] == (1, 1)
    assert len(shapes) == 4 * 2 + 2


def test_created_params_match_expected_shapes():
    for kind in ("gcn", "s2v"):
        model = create_model(kind, "harmonic", seed=0, embed_dim=8)
        want = expected_param_shapes(model.config_dict())
        assert {k: v.data.shape for k, v in model.parameters().items()} == want
    model = create_model("baseline", "harmonic", seed=0)
    want = expected_param_shapes(model.config_dict())
    assert {k: v.data.shape for k, v in model.parameters().items()} == want


def test_create_model_validation():
    with pytest.raises(InvalidParameterError):
        create_model("mlp", "closeness", seed=0)
    with pytest.raises(InvalidParameterError):
        create_model("gcn", "pagerank", seed=0)
    with pytest.raises(InvalidParameterError):
        create_model("baseline", "closeness", seed=0, embed_dim=8)
    with pytest.raises(InvalidParameterError):
        EmbedderConfig(kind="gcn", layers=0).validated()


def test_regularized_excludes_biases():
    model = create_model("baseline", "closeness", seed=0)
    reg = model.regularized()
    assert len(reg) == 5  # four hidden weight matrices plus the output
    bias_ids = {id(model.params[k]) for k in model.params if "bias" in k}
    assert all(id(p) not in bias_ids for p in reg)


def test_normalized_adjacency_triangle():
    g = from_pairs(3, [(0, 1), (1, 2), (0, 2)])
    mat = normalized_adjacency(g).to_dense()
    assert np.allclose(mat, np.full((3, 3), 1.0 / 3.0), atol=1e-15)


def test_normalized_adjacency_single_edge():
    g = from_pairs(2, [(0, 1)])
    mat = normalized_adjacency(g).to_dense()
    assert np.allclose(mat, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_normalized_adjacency_rows_sorted():
    g = generate(GeneratorSpec("sf", n=40, m=2, seed=2))
    mat = normalized_adjacency(g)
    for v in range(g.n):
        row = mat.indices[mat.indptr[v]:mat.indptr[v + 1]]
        assert np.all(np.diff(row) > 0)
        assert v in row


def test_forward_shapes_and_determinism():
    g = generate(GeneratorSpec("sf", n=30, m=2, seed=1))
    for kind in ("gcn", "s2v", "baseline"):
        model = (create_model(kind, "closeness", seed=5, embed_dim=8)
                 if kind != "baseline" else create_model(kind, "closeness", seed=5))
        prepared = model.prepare(g)
        ids = np.arange(g.n, dtype=np.int64)
        out1 = model.forward(prepared, ids).data
        out2 = model.forward(prepared, ids).data
        assert out1.shape == (g.n, 1)
        assert np.array_equal(out1, out2)
        pred = model.predict(g)
        assert pred.shape == (g.n,)


def test_seed_controls_init():
    a = create_model("s2v", "closeness", seed=1, embed_dim=8)
    b = create_model("s2v", "closeness", seed=1, embed_dim=8)
    c = create_model("s2v", "closeness", seed=2, embed_dim=8)
    for name in a.params:
        assert np.array_equal(a.params[name].data, b.params[name].data)
    assert any(not np.array_equal(a.params[n].data, c.params[n].data)
               for n in a.params)


def test_target_maps():
    ranks = np.array([0.0, 0.25, 1.0])
    nca = create_model("gcn", "closeness", seed=0, embed_dim=4)
    assert nca.targets_from_ranks(ranks).tolist() == ranks.tolist()
    assert nca.to_rank01(ranks).tolist() == ranks.tolist()
    base = create_model("baseline", "closeness", seed=0)
    assert base.targets_from_ranks(ranks).tolist() == [-1.0, -0.5, 1.0]
    assert np.allclose(base.to_rank01(np.array([-1.0, -0.5, 1.0])), ranks)


def test_baseline_features_range_and_shape():
    g = generate(GeneratorSpec("sf", n=25, m=2, seed=4))
    feats = baseline_features(g)
    assert feats.shape == (25, 2)
    assert feats.min() >= -1.0 and feats.max() <= 1.0


def test_baseline_scores_depend_only_on_features():
    # star leaves share identical (degree, eigenvector) ranks, so they
    # must come out of the network with identical scores
    g = from_pairs(5, [(0, i) for i in range(1, 5)])
    model = create_model("baseline", "closeness", seed=0)
    scores = model.predict(g)
    assert len(set(scores[1:].tolist())) == 1
    assert scores[0] != scores[1]


def test_batch_validation():
    ids = np.array([0, 1], dtype=np.int64)
    Batch(ids, np.array([0.1, 0.2])).validated(5)
    with pytest.raises(ShapeError):
        Batch(ids, np.array([0.1])).validated(5)
    with pytest.raises(InvalidParameterError):
        Batch(np.array([9], dtype=np.int64), np.array([0.1])).validated(5)
    with pytest.raises(ShapeError):
        Batch(np.array([], dtype=np.int64), np.array([])).validated(5)


def test_model_from_config_roundtrip():
    model = create_model("s2v", "betweenness", seed=3, embed_dim=8)
    clone = model_from_config(model.config_dict(), seed=3)
    assert clone.kind == "s2v" and clone.centrality == "betweenness"
    for name in model.params:
        assert np.array_equal(model.params[name].data, clone.params[name].data)


def test_load_weights_validates():
    model = create_model("gcn", "closeness", seed=0, embed_dim=4)
    good = {k: v.data.copy() for k, v in model.params.items()}
    load_weights(model, good)

    missing = dict(good)
    del missing["head/out"]
    with pytest.raises(ShapeError, match="head/out"):
        load_weights(model, missing)

    bad_shape = dict(good)
    bad_shape["head/out"] = np.zeros((4, 2))
    with pytest.raises(ShapeError, match="head/out"):
        load_weights(model, bad_shape)

    extra = dict(good)
    extra["head/extra"] = np.zeros((1, 1))
    with pytest.raises(ShapeError):
        load_weights(model, extra)


def test_prepare_features_are_degree_ranks():
    g = from_pairs(4, [(0, 1), (0, 2), (0, 3)])
    model = create_model("gcn", "closeness", seed=0, embed_dim=4)
    feats = model.prepare(g).features.data
    # hub has top rank, the three leaves share the midrank below it
    assert feats[:, 0].tolist() == [1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]


def test_s2v_prepare_carries_raw_degrees():
    g = from_pairs(4, [(0, 1), (0, 2), (0, 3)])
    model = create_model("s2v", "closeness", seed=0, embed_dim=4)
    prepared = model.prepare(g)
    assert prepared.degrees.data[:, 0].tolist() == [3.0, 1.0, 1.0, 1.0]
    assert isinstance(prepared.features, Tensor)
