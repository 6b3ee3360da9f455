"""Pure-Python shortest-delay kernel, used when the compiled one is unavailable."""

from __future__ import annotations

import heapq

import numpy as np


def dijkstra(indptr, indices, weights, source):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    dist = [float("inf")] * n
    hops = [0] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if done[v]:
                continue
            nd = du + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                hops[v] = hops[u] + 1
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
                hops[v] = hops[u] + 1
    return np.array(dist, dtype=np.float64), np.array(hops, dtype=np.int64)
