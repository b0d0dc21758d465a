"""Numpy fallbacks for the compiled graph kernels.

Same contracts as ``ncage._kernels._ckern``. Selected at import time when the
extension is missing or ``NCAGE_PURE_PYTHON=1`` is set. Loops are vectorized
over BFS frontiers, so these stay usable (if slower) on graphs with tens of
thousands of edges.
"""

from __future__ import annotations

import numpy as np


def _expand(indptr, indices, nodes, counts):
    """Flat (heads, neighbors) arrays for all CSR rows in `nodes`."""
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    heads = np.repeat(nodes, counts)
    starts = np.repeat(indptr[nodes], counts)
    shift = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    return heads, indices[starts + shift]


def brandes_betweenness(indptr, indices, n):
    """Exact betweenness over unordered node pairs, one BFS per source."""
    bc = np.zeros(n, dtype=np.float64)
    if n == 0:
        return bc
    deg = np.diff(indptr)
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        sigma = np.zeros(n, dtype=np.float64)
        dist[s] = 0
        sigma[s] = 1.0
        levels = []
        frontier = np.array([s], dtype=np.int64)
        depth = 0
        while frontier.size:
            levels.append(frontier)
            heads, nbrs = _expand(indptr, indices, frontier, deg[frontier])
            fresh = nbrs[dist[nbrs] < 0]
            depth += 1
            if fresh.size:
                fresh = np.unique(fresh)
                dist[fresh] = depth
            step = dist[nbrs] == depth
            np.add.at(sigma, nbrs[step], sigma[heads[step]])
            frontier = fresh
        delta = np.zeros(n, dtype=np.float64)
        for lev in range(len(levels) - 1, 0, -1):
            w = levels[lev]
            heads, nbrs = _expand(indptr, indices, w, deg[w])
            up = dist[nbrs] == lev - 1
            np.add.at(
                delta,
                nbrs[up],
                sigma[nbrs[up]] / sigma[heads[up]] * (1.0 + delta[heads[up]]),
            )
            bc[w] += delta[w]
    return bc / 2.0


def bfs_distance_stats(indptr, indices, n):
    """Per-source BFS aggregates: (sum of distances, sum of 1/distance, reached count)."""
    dist_sum = np.zeros(n, dtype=np.float64)
    inv_sum = np.zeros(n, dtype=np.float64)
    reach = np.zeros(n, dtype=np.int64)
    deg = np.diff(indptr)
    for s in range(n):
        seen = np.zeros(n, dtype=bool)
        seen[s] = True
        frontier = np.array([s], dtype=np.int64)
        d = 0
        while frontier.size:
            _, nbrs = _expand(indptr, indices, frontier, deg[frontier])
            fresh = nbrs[~seen[nbrs]]
            d += 1
            if fresh.size:
                fresh = np.unique(fresh)
                seen[fresh] = True
                dist_sum[s] += float(d) * fresh.size
                inv_sum[s] += fresh.size / float(d)
                reach[s] += fresh.size
            frontier = fresh if fresh.size else np.empty(0, dtype=np.int64)
    return dist_sum, inv_sum, reach


def connected_components(indptr, indices, n):
    """Component labels, assigned in increasing order of the smallest member id."""
    labels = np.full(n, -1, dtype=np.int64)
    deg = np.diff(indptr)
    label = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = label
        frontier = np.array([s], dtype=np.int64)
        while frontier.size:
            _, nbrs = _expand(indptr, indices, frontier, deg[frontier])
            fresh = nbrs[labels[nbrs] < 0]
            if fresh.size:
                fresh = np.unique(fresh)
                labels[fresh] = label
            frontier = fresh if fresh.size else np.empty(0, dtype=np.int64)
        label += 1
    return labels


def spmm_csr(indptr, indices, data, dense):
    """CSR (n x n) times dense (n x f)."""
    n = indptr.shape[0] - 1
    out = np.zeros((n, dense.shape[1]), dtype=np.float64)
    if indices.size == 0:
        return out
    prod = dense[indices] * data[:, None]
    filled = np.diff(indptr) > 0
    # reduceat over the starts of the non-empty rows; empty rows stay zero
    out[filled] = np.add.reduceat(prod, indptr[:-1][filled], axis=0)
    return out


def count_inversions(codes):
    """Pairs i<j with codes[i] > codes[j] (strict; ties not counted)."""

    def rec(a):
        if a.size <= 1:
            return a, 0
        mid = a.size // 2
        left, cl = rec(a[:mid])
        right, cr = rec(a[mid:])
        pos = np.searchsorted(left, right, side="right")
        cross = int((left.size - pos).sum())
        return np.sort(np.concatenate([left, right]), kind="mergesort"), cl + cr + cross

    return rec(np.asarray(codes, dtype=np.int64))[1]
