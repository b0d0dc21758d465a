"""Release gates. One test per gate, each printing a PASS/FAIL line.

The first three gates check the numerical core against independent
oracles (exact centralities, rank correlation, gradients). Gates 4-6
are desk-scale training runs with quality floors; 7 checks that
inference cost scales linearly with edge count; 8 and 9 pin down exact
reproducibility and checkpoint resume.
"""

import time
import warnings

import numpy as np
import pytest

from ncage.centrality import (
    betweenness_centrality,
    closeness_centrality,
    harmonic_centrality,
    normalize_ranks,
    power_iteration,
    rank_vector,
)
from ncage.errors import InvalidParameterError
from ncage.evaluation import build_test_sets, edge_ladder, evaluate, kendall_tau_b
from ncage.graph import GeneratorSpec, from_pairs, generate, is_connected, largest_component
from ncage.head import training_loss
from ncage.models import create_model, model_from_checkpoint
from ncage.training import TABLE_DEFAULTS, TrainConfig, build_training_set, train
from ncage import autodiff as ad
from tests import oracles


def _line(num, desc, ok, detail):
    print(f"\nACCEPTANCE {num} {desc}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def _random_connected(rng, n):
    pairs = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    extra = rng.integers(0, n, size=(n, 2))
    pairs += [(int(a), int(b)) for a, b in extra if a != b]
    return from_pairs(n, pairs)


# ---------------------------------------------------------------- gate 1

def test_c1_exact_centralities_match_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)

    worst_bc = 0.0
    for _ in range(200):
        g = _random_connected(rng, int(rng.integers(2, 9)))
        diff = np.abs(betweenness_centrality(g) - oracles.brute_betweenness(g))
        worst_bc = max(worst_bc, float(diff.max(initial=0.0)))

    worst_dist = 0.0
    worst_cos = 0.0
    for i in range(30):
        topo = ("sf", "sw", "rnd")[i % 3]
        n = int(rng.integers(5, 65))
        spec = GeneratorSpec(topology=topo, n=max(n, 6), seed=int(rng.integers(1 << 30)))
        g = generate(spec)
        if not is_connected(g):
            g = largest_component(g)
        worst_dist = max(worst_dist,
                         float(np.abs(closeness_centrality(g)
                                      - oracles.brute_closeness(g)).max()),
                         float(np.abs(harmonic_centrality(g)
                                      - oracles.brute_harmonic(g)).max()))
        vec, _ = power_iteration(g, tol=1e-12, max_iter=20000)
        cos = float(vec @ oracles.dense_leading_eigenvector(g))
        worst_cos = max(worst_cos, 1.0 - abs(cos))

    elapsed = time.perf_counter() - t0
    ok = worst_bc < 1e-12 and worst_dist < 1e-10 and worst_cos < 1e-8 and elapsed < 60
    detail = (f"betweenness max|diff|={worst_bc:.2e}, distance max|diff|="
              f"{worst_dist:.2e}, eigen cos dist={worst_cos:.2e}, {elapsed:.1f}s")
    assert _line(1, "exact centralities vs oracles", ok, detail), detail


# ---------------------------------------------------------------- gate 2

def test_c2_rank_correlation_matches_quadratic_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 101))
        x = rng.integers(0, 10, size=n).astype(np.float64)
        y = rng.integers(0, 10, size=n).astype(np.float64)
        slow = oracles.quadratic_kendall_tau_b(x, y)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            fast = kendall_tau_b(x, y)
        if np.isnan(slow):
            assert np.isnan(fast)
        else:
            worst = max(worst, abs(fast - slow))

    exact = True
    for _ in range(50):
        n = int(rng.integers(2, 200))
        with_ties = rng.integers(0, 5, size=n).astype(np.float64)
        if np.all(with_ties == with_ties[0]):
            continue
        exact &= kendall_tau_b(with_ties, with_ties.copy()) == 1.0
        tie_free = rng.permutation(n).astype(np.float64)
        exact &= kendall_tau_b(tie_free, -tie_free) == -1.0

    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and exact and elapsed < 10
    detail = (f"max|fast-slow|={worst:.2e} over 1000 tied lists, "
              f"exact +/-1 endpoints={exact}, {elapsed:.1f}s")
    assert _line(2, "tau-b vs quadratic oracle", ok, detail), detail


# ---------------------------------------------------------------- gate 3

def _grad_config(i):
    kind = ("gcn", "s2v", "baseline")[i % 3]
    centrality = ("closeness", "betweenness", "harmonic", "eigenvector", "degree")[i % 5]
    n = 4 + (i % 3)
    embed = (4, 6, 8)[(i // 3) % 3]
    return kind, centrality, n, embed


def test_c3_end_to_end_gradients_match_finite_differences():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(20):
        kind, centrality, n, embed = _grad_config(i)
        g = generate(GeneratorSpec("sf", n=n, m=2, seed=900 + i))
        if kind == "baseline":
            model = create_model(kind, centrality, seed=i)
        else:
            model = create_model(kind, centrality, seed=i, embed_dim=embed)
        prepared = model.prepare(g)
        targets = model.targets_from_ranks(rank_vector(centrality, g).values)
        ids = np.arange(g.n, dtype=np.int64)
        wd = TABLE_DEFAULTS[kind]["weight_decay"]
        params = model.parameters()
        reg = model.regularized()

        def loss_value():
            out = model.forward(prepared, ids)
            return float(training_loss(out, targets[ids], reg, wd).data[0, 0])

        ad.zero_grad(params)
        out = model.forward(prepared, ids)
        training_loss(out, targets[ids], reg, wd).backward()
        got = np.concatenate([
            (p.grad if p.grad is not None else np.zeros_like(p.data)).ravel()
            for _, p in sorted(params.items())])
        fd = oracles.finite_difference_grads(loss_value, params)
        want = np.concatenate([fd[name].ravel() for name in sorted(params)])
        scale = max(np.linalg.norm(got), np.linalg.norm(want))
        rel = float(np.linalg.norm(got - want) / scale) if scale else 0.0
        worst = max(worst, rel)

    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 60
    detail = f"worst relative gradient error={worst:.2e} over 20 configs, {elapsed:.1f}s"
    assert _line(3, "gradients vs finite differences", ok, detail), detail


# ------------------------------------------------------- gates 4, 5, 6

_DESK = dict(model="s2v", data_seed=11, steps=1_000_000,
             num_graphs=100, min_nodes=100, max_nodes=300)


def _desk_train(centrality, seed, corpus):
    config = TrainConfig(centrality=centrality, seed=seed, **_DESK)
    return model_from_checkpoint(train(config, training_set=corpus))


@pytest.fixture(scope="module")
def desk_closeness():
    """Five desk-scale retrainings for closeness, sharing one corpus."""
    t0 = time.perf_counter()
    config = TrainConfig(centrality="closeness", seed=0, **_DESK).resolved()
    proto = create_model("s2v", "closeness", 0)
    corpus = build_training_set(config, proto, workers=4)
    corpus_s = time.perf_counter() - t0
    held_out = build_test_sets(seed=1, count=30, min_n=100, max_n=300)["sf"]
    means, times = [], []
    for seed in range(5):
        t1 = time.perf_counter()
        model = _desk_train("closeness", seed, corpus)
        means.append(evaluate(model, held_out).mean_tau())
        times.append(time.perf_counter() - t1)
    return {"means": means, "corpus_s": corpus_s, "times": times}


@pytest.fixture(scope="module")
def desk_betweenness():
    """One desk-scale betweenness run, scored per test topology."""
    config = TrainConfig(centrality="betweenness", seed=0, **_DESK).resolved()
    proto = create_model("s2v", "betweenness", 0)
    corpus = build_training_set(config, proto, workers=4)
    model = _desk_train("betweenness", 0, corpus)
    sets = build_test_sets(seed=1, count=15, min_n=100, max_n=300)
    return {name: evaluate(model, sets[name]).mean_tau()
            for name in ("sf", "rnd", "sw")}


def test_c4_desk_scale_closeness_quality(desk_closeness):
    mean = desk_closeness["means"][0]
    elapsed = desk_closeness["corpus_s"] + desk_closeness["times"][0]
    ok = mean >= 0.85 and elapsed < 1800
    detail = (f"mean tau-b={mean:.4f} on 30 held-out scale-free graphs "
              f"(floor 0.85), {elapsed:.0f}s")
    assert _line(4, "desk-scale closeness quality", ok, detail), detail


def test_c5_betweenness_specializes_to_training_topology(desk_betweenness):
    sf = desk_betweenness["sf"]
    rnd = desk_betweenness["rnd"]
    sw = desk_betweenness["sw"]
    ok = sf >= rnd and sf >= sw
    detail = f"mean tau-b: sf={sf:.4f} rnd={rnd:.4f} sw={sw:.4f} (need sf >= both)"
    assert _line(5, "cross-topology ordering for betweenness", ok, detail), detail


def test_c6_retraining_stability(desk_closeness):
    means = np.array(desk_closeness["means"])
    spread = float(means.std())
    ok = spread <= 1e-2
    detail = ("per-seed means=" + "/".join(f"{m:.4f}" for m in means)
              + f", stddev={spread:.2e} (cap 1e-2)")
    assert _line(6, "stability across 5 retraining seeds", ok, detail), detail


# ---------------------------------------------------------------- gate 7

def test_c7_inference_scales_linearly_in_edges():
    model = create_model("s2v", "closeness", seed=0)
    edges, seconds, r2 = edge_ladder(model, repeats=5)
    ok = r2 >= 0.95
    pairs = ", ".join(f"{e}:{s * 1e3:.0f}ms" for e, s in zip(edges, seconds))
    detail = f"R^2={r2:.4f} over edge ladder ({pairs})"
    assert _line(7, "linear inference cost in |E|", ok, detail), detail


# ------------------------------------------------------- gates 8 and 9

_SMALL = dict(model="s2v", centrality="closeness", steps=5000, data_seed=4,
              num_graphs=5, min_nodes=50, max_nodes=80)


def test_c8_fixed_seed_reproduces_run_exactly():
    held_out = build_test_sets(seed=2, count=3, min_n=50, max_n=80)["sf"]
    traces, taus = [], []
    for _ in range(2):
        trace = []
        final = train(TrainConfig(seed=3, **_SMALL),
                      on_batch=lambda s, l, e: trace.append((s, l, e)))
        model = model_from_checkpoint(final)
        taus.append([float(r.tau_b) for r in evaluate(model, held_out).rows])
        traces.append(trace)
    ok = traces[0] == traces[1] and taus[0] == taus[1]
    detail = (f"{len(traces[0])} loss entries identical={traces[0] == traces[1]}, "
              f"final tau-b identical={taus[0] == taus[1]}")
    assert _line(8, "bitwise repeatable training", ok, detail), detail


def test_c9_resume_matches_uninterrupted_loss_trace(tmp_path):
    full_trace = []
    full = train(TrainConfig(seed=3, **_SMALL),
                 on_batch=lambda s, l, e: full_trace.append((s, l)))

    ckdir = tmp_path / "ck"
    ckdir.mkdir()
    import ncage.checkpoint as ck
    import os
    train(TrainConfig(seed=3, checkpoint_interval=2048, **_SMALL),
          checkpoint_dir=str(ckdir))
    mid = ck.load(ckdir / sorted(os.listdir(ckdir))[0])

    tail_trace = []
    resumed = train(TrainConfig(seed=3, checkpoint_interval=2048, **_SMALL),
                    resume_from=mid,
                    on_batch=lambda s, l, e: tail_trace.append((s, l)))
    want = [t for t in full_trace if t[0] > mid.step]
    same_weights = all(np.array_equal(full.weights[k], resumed.weights[k])
                       for k in full.weights)
    ok = tail_trace == want and same_weights
    detail = (f"resumed at step {mid.step}; {len(tail_trace)} tail losses "
              f"identical={tail_trace == want}, weights identical={same_weights}")
    assert _line(9, "checkpoint resume reproduces the run", ok, detail), detail
