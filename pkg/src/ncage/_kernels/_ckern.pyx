# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the hot graph loops.

Mirrors ncage._kernels.pykern: Brandes betweenness, per-source BFS
aggregates, connected components, CSR sparse-dense product, and merge-sort
inversion counting. All inner loops run without the GIL.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64


def brandes_betweenness(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n):
    out = np.zeros(n, dtype=np.float64)
    if n == 0:
        return out
    cdef f64[::1] bc = out
    cdef i64[::1] dist = np.empty(n, dtype=np.int64)
    cdef f64[::1] sigma = np.empty(n, dtype=np.float64)
    cdef f64[::1] delta = np.empty(n, dtype=np.float64)
    cdef i64[::1] order = np.empty(n, dtype=np.int64)
    # predecessors of w fit inside w's CSR slot: at most deg(w) of them
    cdef i64[::1] pred = np.empty(max(indices.shape[0], 1), dtype=np.int64)
    cdef i64[::1] pcnt = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t s, head, tail, i, j
    cdef i64 v, w, e
    cdef f64 coeff
    with nogil:
        for s in range(n):
            for i in range(n):
                dist[i] = -1
                sigma[i] = 0.0
                delta[i] = 0.0
                pcnt[i] = 0
            dist[s] = 0
            sigma[s] = 1.0
            order[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = order[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        order[tail] = w
                        tail += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
                        pred[indptr[w] + pcnt[w]] = v
                        pcnt[w] += 1
            for i in range(tail - 1, 0, -1):
                w = order[i]
                coeff = (1.0 + delta[w]) / sigma[w]
                for j in range(pcnt[w]):
                    v = pred[indptr[w] + j]
                    delta[v] += sigma[v] * coeff
                bc[w] += delta[w]
    out /= 2.0
    return out


def bfs_distance_stats(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n):
    ds = np.zeros(n, dtype=np.float64)
    hs = np.zeros(n, dtype=np.float64)
    rc = np.zeros(n, dtype=np.int64)
    if n == 0:
        return ds, hs, rc
    cdef f64[::1] dist_sum = ds
    cdef f64[::1] inv_sum = hs
    cdef i64[::1] reach = rc
    cdef i64[::1] dist = np.empty(n, dtype=np.int64)
    cdef i64[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t s, head, tail, i
    cdef i64 v, w, e, d
    with nogil:
        for s in range(n):
            for i in range(n):
                dist[i] = -1
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if dist[w] < 0:
                        d = dist[v] + 1
                        dist[w] = d
                        queue[tail] = w
                        tail += 1
                        dist_sum[s] += <f64> d
                        inv_sum[s] += 1.0 / <f64> d
                        reach[s] += 1
    return ds, hs, rc


def connected_components(const i64[::1] indptr, const i64[::1] indices, Py_ssize_t n):
    out = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return out
    cdef i64[::1] labels = out
    cdef i64[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t s, head, tail
    cdef i64 v, w, e, label = 0
    with nogil:
        for s in range(n):
            if labels[s] >= 0:
                continue
            labels[s] = label
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if labels[w] < 0:
                        labels[w] = label
                        queue[tail] = w
                        tail += 1
            label += 1
    return out


def spmm_csr(const i64[::1] indptr, const i64[::1] indices, const f64[::1] data,
             const f64[:, ::1] dense):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t f = dense.shape[1]
    out = np.zeros((n, f), dtype=np.float64)
    cdef f64[:, ::1] res = out
    cdef Py_ssize_t i, k
    cdef i64 e, col
    cdef f64 val
    with nogil:
        for i in range(n):
            for e in range(indptr[i], indptr[i + 1]):
                col = indices[e]
                val = data[e]
                for k in range(f):
                    res[i, k] += val * dense[col, k]
    return out


def count_inversions(const i64[::1] codes):
    cdef Py_ssize_t n = codes.shape[0]
    if n < 2:
        return 0
    work_arr = np.array(codes, dtype=np.int64)
    buf_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] a = work_arr
    cdef i64[::1] buf = buf_arr
    cdef unsigned long long count = 0
    cdef Py_ssize_t width = 1, lo, mid, hi, li, ri, k
    with nogil:
        while width < n:
            lo = 0
            while lo + width < n:
                mid = lo + width
                hi = mid + width
                if hi > n:
                    hi = n
                li = lo
                ri = mid
                k = lo
                while li < mid and ri < hi:
                    if a[ri] < a[li]:
                        count += <unsigned long long> (mid - li)
                        buf[k] = a[ri]
                        ri += 1
                    else:
                        buf[k] = a[li]
                        li += 1
                    k += 1
                while li < mid:
                    buf[k] = a[li]
                    li += 1
                    k += 1
                while ri < hi:
                    buf[k] = a[ri]
                    ri += 1
                    k += 1
                for k in range(lo, hi):
                    a[k] = buf[k]
                lo += 2 * width
            width *= 2
    return int(count)
