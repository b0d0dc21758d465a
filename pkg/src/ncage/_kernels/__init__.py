"""Kernel backend selection.

The compiled extension (``_ckern``) is preferred when it imported cleanly;
otherwise the numpy fallback in ``pykern`` is used. Setting the environment
variable ``NCAGE_PURE_PYTHON=1`` forces the fallback, which is handy for
debugging and for benchmarking the two implementations against each other.
"""

import os

import numpy as np

from . import pykern

if os.environ.get("NCAGE_PURE_PYTHON", "") == "1":
    _impl = pykern
    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pykern
        BACKEND = "python"


def _csr(indptr, indices):
    return (np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64))


def brandes_betweenness(indptr, indices, n):
    """Betweenness of every node, unordered source/target pairs."""
    indptr, indices = _csr(indptr, indices)
    return _impl.brandes_betweenness(indptr, indices, int(n))


def bfs_distance_stats(indptr, indices, n):
    """Per source: sum of distances, sum of inverse distances, reachable count."""
    indptr, indices = _csr(indptr, indices)
    return _impl.bfs_distance_stats(indptr, indices, int(n))


def connected_components(indptr, indices, n):
    """Component label per node; labels ordered by smallest member id."""
    indptr, indices = _csr(indptr, indices)
    return _impl.connected_components(indptr, indices, int(n))


def spmm_csr(indptr, indices, data, dense):
    """CSR sparse times dense, result is dense float64."""
    indptr, indices = _csr(indptr, indices)
    data = np.ascontiguousarray(data, dtype=np.float64)
    dense = np.ascontiguousarray(dense, dtype=np.float64)
    return _impl.spmm_csr(indptr, indices, data, dense)


def count_inversions(codes):
    """Strict inversions in an integer sequence (ties do not count)."""
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    return _impl.count_inversions(codes)
