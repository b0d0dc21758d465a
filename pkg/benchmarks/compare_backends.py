#!/usr/bin/env python3
"""Time the compiled kernels against the pure-NumPy fallback.

Run from the repository root:

    python3 benchmarks/compare_backends.py [--nodes N] [--repeats R]

The same inputs are fed to both implementations and the minimum wall
time over the repeats is reported, along with the speedup. Agreement is
asserted on every call so the benchmark doubles as a consistency check.
"""

import argparse
import time

import numpy as np

from ncage._kernels import pykern
from ncage.graph import GeneratorSpec, generate

try:
    from ncage._kernels import _ckern
except ImportError:
    _ckern = None


def _best(fn, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=3000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _ckern is None:
        raise SystemExit("compiled extension is not built; nothing to compare")

    g = generate(GeneratorSpec("sf", n=args.nodes, m=2, seed=args.seed))
    rng = np.random.default_rng(args.seed)
    data = np.ones(g.indices.shape[0])
    x = rng.normal(size=(g.n, 128))
    codes = rng.integers(0, 1000, size=200_000).astype(np.int64)

    cases = [
        ("brandes_betweenness",
         lambda k: k.brandes_betweenness(g.indptr, g.indices, g.n)),
        ("bfs_distance_stats",
         lambda k: k.bfs_distance_stats(g.indptr, g.indices, g.n)),
        ("connected_components",
         lambda k: k.connected_components(g.indptr, g.indices, g.n)),
        ("spmm_csr",
         lambda k: k.spmm_csr(g.indptr, g.indices, data, x)),
        ("count_inversions",
         lambda k: k.count_inversions(codes)),
    ]

    print(f"graph: n={g.n} m={g.m}; feature block {x.shape}; "
          f"{codes.shape[0]} inversion codes")
    print(f"{'kernel':<22}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for name, call in cases:
        fast, got = _best(lambda: call(_ckern), args.repeats)
        slow, want = _best(lambda: call(pykern), args.repeats)
        if isinstance(got, tuple):
            agree = all(np.allclose(a, b, rtol=1e-12, atol=1e-12)
                        for a, b in zip(got, want))
        else:
            agree = np.allclose(got, want, rtol=1e-12, atol=1e-12)
        assert agree, f"{name}: backends disagree"
        print(f"{name:<22}{fast * 1e3:>10.2f}ms{slow * 1e3:>10.2f}ms"
              f"{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
