# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Single-source shortest delays with hop counts over a CSR adjacency."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline bint _less(double da, Py_ssize_t na, double db, Py_ssize_t nb) noexcept nogil:
    return da < db or (da == db and na < nb)


cdef void _push(double* hd, Py_ssize_t* hn, Py_ssize_t* size, double d, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(d, n, hd[parent], hn[parent]):
            hd[i] = hd[parent]
            hn[i] = hn[parent]
            i = parent
        else:
            break
    hd[i] = d
    hn[i] = n


cdef void _pop(double* hd, Py_ssize_t* hn, Py_ssize_t* size) noexcept nogil:
    cdef Py_ssize_t last, i, child
    cdef double d
    cdef Py_ssize_t n
    size[0] -= 1
    last = size[0]
    if last == 0:
        return
    d = hd[last]
    n = hn[last]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= last:
            break
        if child + 1 < last and _less(hd[child + 1], hn[child + 1], hd[child], hn[child]):
            child += 1
        if _less(hd[child], hn[child], d, n):
            hd[i] = hd[child]
            hn[i] = hn[child]
            i = child
        else:
            break
    hd[i] = d
    hn[i] = n


def dijkstra(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
             const double[::1] weights, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t cap = indices.shape[0] + 1
    dist_arr = np.full(n, np.inf)
    hops_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef cnp.int64_t[::1] hops = hops_arr
    cdef cnp.int64_t[::1] pred = np.full(n, -1, dtype=np.int64)
    cdef unsigned char[::1] done = np.zeros(n, dtype=np.uint8)
    cdef double* hd = <double*> malloc(cap * sizeof(double))
    cdef Py_ssize_t* hn = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t u, v, k
    cdef double du, nd
    if hd == NULL or hn == NULL:
        free(hd)
        free(hn)
        raise MemoryError()
    try:
        with nogil:
            dist[source] = 0.0
            _push(hd, hn, &size, 0.0, source)
            while size > 0:
                du = hd[0]
                u = hn[0]
                _pop(hd, hn, &size)
                if done[u]:
                    continue
                done[u] = 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if done[v]:
                        continue
                    nd = du + weights[k]
                    if nd < dist[v]:
                        dist[v] = nd
                        pred[v] = u
                        hops[v] = hops[u] + 1
                        _push(hd, hn, &size, nd, v)
                    elif nd == dist[v] and u < pred[v]:
                        pred[v] = u
                        hops[v] = hops[u] + 1
    finally:
        free(hd)
        free(hn)
    return dist_arr, hops_arr
