"""Exact node centralities and rank normalization.

These are the reference quantities the learned models are trained to
approximate, so they are computed exactly: full BFS per source for the
distance measures, Brandes' algorithm for betweenness, and power
iteration for the eigenvector measure.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DisconnectedGraphError, InvalidParameterError

CENTRALITY_KINDS = ("degree", "eigenvector", "closeness", "harmonic", "betweenness")


@dataclass(frozen=True)
class CentralityVector:
    kind: str
    values: np.ndarray


@dataclass(frozen=True)
class RankVector:
    """Normalized ranks in [0, 1], ascending with value, ties mid-ranked."""
    kind: str
    values: np.ndarray


def degree_centrality(g):
    return g.degrees().astype(np.float64)


def power_iteration(g, tol=1e-10, max_iter=1000):
    """Leading eigenvector of the adjacency matrix, unit L2 norm.

    Iterates on A + I so that bipartite graphs (where A alone flips sign
    each step) still converge; the shift leaves the eigenvectors alone.
    Convergence is max-norm distance between successive iterates.
    Returns (vector, iterations_used).
    """
    if g.n == 0:
        return np.zeros(0), 0
    v = np.ones(g.n, dtype=np.float64) / np.sqrt(g.n)
    data = np.ones(g.indices.shape[0], dtype=np.float64)
    for it in range(1, max_iter + 1):
        # w = (A + I) v
        w = _kernels.spmm_csr(g.indptr, g.indices, data, v[:, None])[:, 0] + v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return v, it
        w /= norm
        if np.max(np.abs(w - v)) < tol:
            return w, it
        v = w
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def eigenvector_centrality(g, tol=1e-10, max_iter=1000):
    vec, _ = power_iteration(g, tol=tol, max_iter=max_iter)
    return vec


def closeness_centrality(g):
    """(N-1) / sum of distances. Defined only on connected graphs."""
    dist_sum, _, reach = _kernels.bfs_distance_stats(g.indptr, g.indices, g.n)
    if g.n > 1 and np.any(reach != g.n - 1):
        raise DisconnectedGraphError("closeness requires a connected graph")
    out = np.zeros(g.n, dtype=np.float64)
    if g.n > 1:
        out = (g.n - 1) / dist_sum
    return out


def harmonic_centrality(g):
    """Sum of inverse distances; unreachable pairs contribute zero."""
    _, inv_sum, _ = _kernels.bfs_distance_stats(g.indptr, g.indices, g.n)
    return inv_sum


def betweenness_centrality(g):
    """Shortest-path betweenness over unordered node pairs."""
    return _kernels.brandes_betweenness(g.indptr, g.indices, g.n)


def compute(kind, g):
    """Dispatch on centrality name; returns a CentralityVector."""
    if kind not in CENTRALITY_KINDS:
        raise InvalidParameterError(f"unknown centrality {kind!r}")
    fn = {
        "degree": degree_centrality,
        "eigenvector": eigenvector_centrality,
        "closeness": closeness_centrality,
        "harmonic": harmonic_centrality,
        "betweenness": betweenness_centrality,
    }[kind]
    return CentralityVector(kind=kind, values=fn(g))


def normalize_ranks(values):
    """Map raw scores to rank space in [0, 1].

    Smallest score gets rank 1, largest rank N; tied scores all receive
    the mean of the ranks they span. The result is (rank - 1) / (N - 1).
    A single node maps to [0.0]; N tied values all map to 0.5.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n == 0:
        return np.zeros(0)
    if n == 1:
        return np.zeros(1)
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    # group boundaries of tied runs
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = sorted_vals[1:] != sorted_vals[:-1]
    group = np.cumsum(boundary) - 1
    counts = np.bincount(group)
    ends = np.cumsum(counts).astype(np.float64)         # last rank in each run
    starts = ends - counts + 1.0                        # first rank in each run
    mid = (starts + ends) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = mid[group]
    return (ranks - 1.0) / (n - 1.0)


def rank_vector(kind, g):
    return RankVector(kind=kind, values=normalize_ranks(compute(kind, g).values))
