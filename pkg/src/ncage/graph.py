"""Undirected graphs in CSR form plus the synthetic generators.

Graphs are simple and undirected: no self-loops, no duplicate edges, node
ids contiguous from 0. Adjacency is stored once per direction so that a
CSR row walk enumerates all neighbors of a node.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EdgeListError, InvalidParameterError

log = logging.getLogger(__name__)

TOPOLOGIES = ("sw", "sf", "rnd")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph.

    ``indptr``/``indices`` are the usual CSR arrays over both edge
    directions. ``node_labels`` maps compact ids back to the labels found
    in an input file; it is None for generated graphs.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    node_labels: np.ndarray | None = field(default=None, compare=False)

    @property
    def m(self):
        """Number of undirected edges."""
        return int(self.indices.shape[0]) // 2

    def degrees(self):
        return np.diff(self.indptr).astype(np.int64)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edge_pairs(self):
        """(m, 2) array of edges with u < v, sorted lexicographically."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        v = self.indices
        keep = u < v
        return np.column_stack((u[keep], v[keep]))

    def validate(self):
        """Check structural invariants; raises InvalidParameterError."""
        if self.n < 0:
            raise InvalidParameterError("negative node count")
        if self.indptr.shape[0] != self.n + 1 or self.indptr[0] != 0:
            raise InvalidParameterError("malformed indptr")
        if self.indptr[-1] != self.indices.shape[0]:
            raise InvalidParameterError("indptr does not cover indices")
        if np.any(np.diff(self.indptr) < 0):
            raise InvalidParameterError("indptr not monotone")
        if self.indices.shape[0]:
            if self.indices.min() < 0 or self.indices.max() >= self.n:
                raise InvalidParameterError("neighbor id out of range")
        for v in range(self.n):
            row = self.neighbors(v)
            if np.any(row == v):
                raise InvalidParameterError(f"self-loop at node {v}")
            if row.shape[0] > 1 and np.any(np.diff(row) <= 0):
                raise InvalidParameterError(f"row {v} not strictly sorted")
        # symmetry: every (u, v) must appear as (v, u) too
        pairs = self.edge_pairs()
        if pairs.shape[0] * 2 != self.indices.shape[0]:
            raise InvalidParameterError("adjacency not symmetric")
        return True


def from_pairs(n, pairs, node_labels=None):
    """Build a Graph from an iterable of (u, v) pairs.

    Self-loops and duplicate edges (in either orientation) are removed.
    """
    pairs = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                       dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidParameterError("edge pairs must be (m, 2)")
    if pairs.shape[0]:
        if pairs.min() < 0 or pairs.max() >= n:
            raise InvalidParameterError("edge endpoint out of range")
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        keep = lo != hi
        lo, hi = lo[keep], hi[keep]
        key = np.unique(lo * np.int64(n) + hi)
        lo, hi = key // n, key % n
        heads = np.concatenate((lo, hi))
        tails = np.concatenate((hi, lo))
    else:
        heads = tails = np.empty(0, dtype=np.int64)
    order = np.lexsort((tails, heads))
    heads, tails = heads[order], tails[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, heads + 1, 1)
    np.cumsum(indptr, out=indptr)
    labels = None
    if node_labels is not None:
        labels = np.asarray(node_labels, dtype=np.int64)
        if labels.shape[0] != n:
            raise InvalidParameterError("node_labels length must equal n")
    return Graph(n=int(n), indptr=indptr, indices=tails, node_labels=labels)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for one synthetic graph.

    topology: "sf" (scale-free preferential attachment), "sw" (ring
    rewiring), or "rnd" (independent edge probability).
    """

    topology: str
    n: int
    m: int = 2                 # sf: edges per new node
    k: int = 4                 # sw: ring degree, must be even
    p: float = float("nan")    # sw: rewire prob (default 0.1); rnd: edge prob (default 4/(n-1))
    seed: int = 0

    def resolved_p(self):
        if not np.isnan(self.p):
            return float(self.p)
        return 0.1 if self.topology == "sw" else 4.0 / (self.n - 1)

    def validated(self):
        if self.topology not in TOPOLOGIES:
            raise InvalidParameterError(f"unknown topology {self.topology!r}")
        if self.n < 2:
            raise InvalidParameterError("need at least 2 nodes")
        if self.topology == "sf" and not 1 <= self.m < self.n:
            raise InvalidParameterError("sf requires 1 <= m < n")
        if self.topology == "sw":
            if self.k % 2 or not 0 < self.k < self.n:
                raise InvalidParameterError("sw requires even k in (0, n)")
        if self.topology in ("sw", "rnd") and not np.isnan(self.p):
            if not 0.0 <= self.p <= 1.0:
                raise InvalidParameterError("probability outside [0, 1]")
        return self


def generate(spec):
    """Generate the graph described by spec. Deterministic in spec.seed."""
    spec.validated()
    rng = np.random.default_rng(spec.seed)
    if spec.topology == "sf":
        return _barabasi_albert(spec.n, spec.m, rng)
    if spec.topology == "sw":
        return _watts_strogatz(spec.n, spec.k, spec.resolved_p(), rng)
    return _erdos_renyi(spec.n, spec.resolved_p(), rng)


def _barabasi_albert(n, m, rng):
    # seed clique of m nodes, then attach each newcomer to m distinct
    # targets drawn proportionally to degree (repeated-node list trick)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    repeated = []
    for i in range(m):
        repeated.extend([i] * max(m - 1, 1))
    for v in range(m, n):
        targets = set()
        while len(targets) < m:
            targets.add(repeated[rng.integers(len(repeated))])
        for t in targets:
            pairs.append((t, v))
            repeated.append(t)
        repeated.extend([v] * m)
    return from_pairs(n, pairs)


def _watts_strogatz(n, k, p, rng):
    half = k // 2
    adj = [set() for _ in range(n)]
    for v in range(n):
        for d in range(1, half + 1):
            w = (v + d) % n
            adj[v].add(w)
            adj[w].add(v)
    if p > 0.0:
        for d in range(1, half + 1):
            for v in range(n):
                w = (v + d) % n
                if w not in adj[v]:
                    continue  # already rewired away
                if rng.random() >= p:
                    continue
                if len(adj[v]) >= n - 1:
                    continue  # v saturated, nothing to rewire to
                t = int(rng.integers(n))
                while t == v or t in adj[v]:
                    t = int(rng.integers(n))
                adj[v].discard(w)
                adj[w].discard(v)
                adj[v].add(t)
                adj[t].add(v)
    pairs = [(v, w) for v in range(n) for w in adj[v] if v < w]
    return from_pairs(n, pairs)


def _erdos_renyi(n, p, rng):
    pairs = []
    for v in range(n - 1):
        hits = np.nonzero(rng.random(n - v - 1) < p)[0]
        for h in hits:
            pairs.append((v, v + 1 + int(h)))
    return from_pairs(n, pairs)


def connected_components(g):
    """Component label per node, labels ordered by smallest member id."""
    return _kernels.connected_components(g.indptr, g.indices, g.n)


def is_connected(g):
    if g.n == 0:
        return True
    labels = connected_components(g)
    return bool(labels.max(initial=0) == 0)


def largest_component(g):
    """Subgraph induced by the largest component, relabeled contiguously.

    Ties go to the component containing the smallest node id. Returns the
    graph unchanged when it is already connected.
    """
    labels = connected_components(g)
    if g.n == 0 or labels.max(initial=0) == 0:
        return g
    sizes = np.bincount(labels)
    # argmax picks the first maximal label; labels are ordered by smallest
    # member, which gives the documented tie-break
    winner = int(np.argmax(sizes))
    keep = np.nonzero(labels == winner)[0]
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.shape[0], dtype=np.int64)
    pairs = g.edge_pairs()
    mask = labels[pairs[:, 0]] == winner
    sub = remap[pairs[mask]]
    old_labels = g.node_labels[keep] if g.node_labels is not None else keep
    return from_pairs(keep.shape[0], sub, node_labels=old_labels)


def load_edge_list(path):
    """Read an edge-list text file into a Graph.

    One edge per line: two integer node labels split on whitespace. Blank
    lines and lines starting with '#' are skipped. Self-loops are dropped
    (logged), duplicate edges collapse. Labels may be arbitrary
    non-negative ints; they are compacted and kept in node_labels.
    """
    raw = []
    loops = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListError(f"expected 2 fields, got {len(parts)}", line=lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"non-integer node id in {text!r}", line=lineno)
            if u < 0 or v < 0:
                raise EdgeListError("negative node id", line=lineno)
            if u == v:
                loops += 1
                continue
            raw.append((u, v))
    if loops:
        log.info("dropped %d self-loop(s) from %s", loops, path)
    if not raw:
        raise EdgeListError(f"no edges found in {path}")
    arr = np.asarray(raw, dtype=np.int64)
    labels = np.unique(arr)
    lookup = {int(lab): i for i, lab in enumerate(labels)}
    compact = np.empty_like(arr)
    for r in range(arr.shape[0]):
        compact[r, 0] = lookup[int(arr[r, 0])]
        compact[r, 1] = lookup[int(arr[r, 1])]
    return from_pairs(labels.shape[0], compact, node_labels=labels)


def save_edge_list(g, path):
    """Write each undirected edge once (u < v), using original labels."""
    pairs = g.edge_pairs()
    if g.node_labels is not None:
        pairs = g.node_labels[pairs]
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in pairs:
            fh.write(f"{u} {v}\n")
