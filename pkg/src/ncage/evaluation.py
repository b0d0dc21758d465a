"""Model evaluation: rank correlation, test corpora, timing.

The quality measure is Kendall's tau-b between predicted scores and the
exact centrality ranks, computed with the O(n log n) inversion-counting
formulation so large graphs are cheap to score.
"""

import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .autodiff import no_grad
from .centrality import compute, normalize_ranks
from .errors import InvalidParameterError
from .graph import GeneratorSpec, generate, is_connected, largest_component

TEST_TOPOLOGIES = ("sw", "sf", "rnd")
_SET_STREAMS = {"sw": 0, "sf": 1, "rnd": 2, "mix": 3}


def kendall_tau_b(x, y):
    """Tie-corrected Kendall correlation of two equal-length sequences.

        tau_b = (C - D) / sqrt((C + D + Tx)(C + D + Ty))

    C/D are concordant/discordant pair counts, Tx/Ty count pairs tied in
    only one sequence. Computed by sorting on x and counting strict
    inversions of y (mergesort), never by the quadratic pair scan.
    Returns NaN (with a RuntimeWarning) when either sequence is constant,
    where the coefficient is undefined.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise InvalidParameterError("sequences must have equal length")
    n = x.shape[0]
    if n < 2:
        warnings.warn("tau-b undefined for fewer than two items", RuntimeWarning)
        return float("nan")
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]

    def tie_pairs(counts):
        return int(np.sum(counts * (counts - 1) // 2))

    tot = n * (n - 1) // 2
    xtie = tie_pairs(_run_lengths(xs))
    ytie = tie_pairs(_run_lengths(np.sort(y)))
    joint = tie_pairs(_joint_run_lengths(xs, ys))
    if xtie == tot or ytie == tot:
        warnings.warn("tau-b undefined: a sequence is constant", RuntimeWarning)
        return float("nan")
    codes = np.searchsorted(np.unique(ys), ys).astype(np.int64)
    swaps = int(_kernels.count_inversions(codes))
    con_minus_dis = tot - xtie - ytie + joint - 2 * swaps
    denom = np.sqrt(float(tot - xtie) * float(tot - ytie))
    return float(con_minus_dis / denom)


def _run_lengths(sorted_vals):
    if sorted_vals.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    boundary = np.empty(sorted_vals.shape[0], dtype=bool)
    boundary[0] = True
    boundary[1:] = sorted_vals[1:] != sorted_vals[:-1]
    return np.diff(np.append(np.nonzero(boundary)[0], sorted_vals.shape[0]))


def _joint_run_lengths(xs, ys):
    if xs.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    boundary = np.empty(xs.shape[0], dtype=bool)
    boundary[0] = True
    boundary[1:] = (xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1])
    return np.diff(np.append(np.nonzero(boundary)[0], xs.shape[0]))


@dataclass(frozen=True)
class GraphRecord:
    set_name: str
    topology: str
    graph_id: int
    graph: object


@dataclass(frozen=True)
class EvalRow:
    set_name: str
    topology: str
    graph_id: int
    n: int
    m: int
    tau_b: float
    prep_s: float
    infer_s: float


@dataclass
class EvalReport:
    rows: list

    def taus(self):
        return np.array([r.tau_b for r in self.rows], dtype=np.float64)

    def mean_tau(self):
        vals = self.taus()
        if vals.size == 0 or np.all(np.isnan(vals)):
            return float("nan")
        return float(np.nanmean(vals))

    def std_tau(self):
        vals = self.taus()
        if vals.size == 0 or np.all(np.isnan(vals)):
            return float("nan")
        return float(np.nanstd(vals))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("set,topology,graph_id,n,m,tau_b,prep_s,infer_s\n")
            for r in self.rows:
                fh.write(f"{r.set_name},{r.topology},{r.graph_id},{r.n},{r.m},"
                         f"{r.tau_b!r},{r.prep_s:.6f},{r.infer_s:.6f}\n")

    def summary(self):
        by_set = {}
        for r in self.rows:
            by_set.setdefault(r.set_name, []).append(r.tau_b)
        lines = []
        for name in sorted(by_set):
            vals = np.array(by_set[name])
            bad = int(np.isnan(vals).sum())
            mean = float(np.nanmean(vals)) if bad < vals.size else float("nan")
            lines.append(f"{name}: graphs={vals.size} mean_tau={mean:.4f}"
                         + (f" undefined={bad}" if bad else ""))
        return "\n".join(lines)


def _test_graph(seed, set_name, topology, index, min_n, max_n):
    rng = np.random.default_rng(
        np.random.SeedSequence((seed, _SET_STREAMS[set_name], index)))
    n = int(rng.integers(min_n, max_n + 1))
    gseed = int(rng.integers(0, 2 ** 62))
    g = generate(GeneratorSpec(topology=topology, n=n, seed=gseed))
    if not is_connected(g):
        g = largest_component(g)
    return g


def build_test_sets(seed, count=100, min_n=100, max_n=1000):
    """Four held-out corpora: one per topology plus a mixed set.

    Disconnected draws are reduced to their largest component so every
    centrality is defined on every graph.
    """
    sets = {}
    for topo in TEST_TOPOLOGIES:
        sets[topo] = [GraphRecord(topo, topo, i,
                                  _test_graph(seed, topo, topo, i, min_n, max_n))
                      for i in range(count)]
    mix = []
    for i in range(count):
        topo = TEST_TOPOLOGIES[i % len(TEST_TOPOLOGIES)]
        mix.append(GraphRecord("mix", topo, i,
                               _test_graph(seed, "mix", topo, i, min_n, max_n)))
    sets["mix"] = mix
    return sets


def evaluate(model, records, centrality=None):
    """Score a model on graph records against exact centrality ranks."""
    kind = centrality or model.centrality
    rows = []
    for rec in records:
        g = rec.graph
        truth = normalize_ranks(compute(kind, g).values)
        t0 = time.perf_counter()
        prepared = model.prepare(g)
        t1 = time.perf_counter()
        with no_grad():
            out = model.forward(prepared, np.arange(g.n, dtype=np.int64))
        t2 = time.perf_counter()
        pred = model.to_rank01(out.data[:, 0])
        rows.append(EvalRow(set_name=rec.set_name, topology=rec.topology,
                            graph_id=rec.graph_id, n=g.n, m=g.m,
                            tau_b=kendall_tau_b(pred, truth),
                            prep_s=t1 - t0, infer_s=t2 - t1))
    return EvalReport(rows=rows)


def bench_inference(model, records, repeats=5):
    """Mean/std preparation and forward times per graph record."""
    out = []
    for rec in records:
        g = rec.graph
        prep, infer = [], []
        for _ in range(repeats):
            t0 = time.perf_counter()
            prepared = model.prepare(g)
            t1 = time.perf_counter()
            with no_grad():
                model.forward(prepared, np.arange(g.n, dtype=np.int64))
            t2 = time.perf_counter()
            prep.append(t1 - t0)
            infer.append(t2 - t1)
        prep, infer = np.array(prep), np.array(infer)
        out.append({"set": rec.set_name, "topology": rec.topology,
                    "graph_id": rec.graph_id, "n": g.n, "m": g.m,
                    "prep_mean": float(prep.mean()), "prep_std": float(prep.std()),
                    "infer_mean": float(infer.mean()), "infer_std": float(infer.std())})
    return out


def edge_ladder(model, edge_targets=(10_000, 20_000, 40_000, 80_000), seed=0,
                repeats=3):
    """Inference time as a function of edge count on generated graphs.

    Uses preferential-attachment graphs with two edges per node, so a
    target of E edges needs about E/2 nodes. Returns (edges, seconds, r2)
    where r2 is the fit quality of seconds against edges.
    """
    edges, seconds = [], []
    for i, target in enumerate(edge_targets):
        n = max(target // 2, 3)
        g = generate(GeneratorSpec(topology="sf", n=n, m=2, seed=seed + i))
        best = []
        prepared = model.prepare(g)
        ids = np.arange(g.n, dtype=np.int64)
        for _ in range(repeats):
            t0 = time.perf_counter()
            with no_grad():
                model.forward(prepared, ids)
            best.append(time.perf_counter() - t0)
        edges.append(g.m)
        seconds.append(min(best))
    return np.array(edges), np.array(seconds), linear_fit_r2(edges, seconds)


def linear_fit_r2(x, y):
    """Coefficient of determination of the least-squares line y = a x + b."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    coeffs = np.polyfit(x, y, 1)
    resid = y - np.polyval(coeffs, x)
    ss_res = float(np.sum(resid * resid))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - ss_res / ss_tot
