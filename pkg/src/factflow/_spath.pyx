# cython: language_level=3
"""Compiled shortest-path kernel.

Mirrors `_spath_py.dijkstra_residual` exactly: binary-heap label-setting
search over residual arcs under reduced costs, ties broken on
(distance, node id). Kept in lockstep with the fallback; the test suite
runs both implementations against each other.
"""

cimport cython
from cpython.mem cimport PyMem_Free, PyMem_Malloc, PyMem_Realloc

import numpy as np

from .errors import InternalInvariantError

cdef double NEG_TOL = 1e-9
cdef double INF = float("inf")

IMPLEMENTATION = "compiled"


cdef struct HeapItem:
    double dist
    long long node


cdef inline bint _less(HeapItem a, HeapItem b) noexcept:
    if a.dist != b.dist:
        return a.dist < b.dist
    return a.node < b.node


@cython.boundscheck(False)
@cython.wraparound(False)
def dijkstra_residual(
    long long[::1] indptr,
    long long[::1] csr_arcs,
    long long[::1] heads,
    double[::1] costs,
    double[::1] residual,
    double[::1] potential,
    long long source,
    double eps,
):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, INF)
    pred_arr = np.full(n, -1, dtype=np.int64)
    settled_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] pred_arc = pred_arr
    cdef unsigned char[::1] settled = settled_arr

    # binary heap with lazy deletion, like heapq
    cdef Py_ssize_t cap = 64
    cdef HeapItem* heap = <HeapItem*> PyMem_Malloc(cap * sizeof(HeapItem))
    if heap == NULL:
        raise MemoryError()
    cdef Py_ssize_t size = 0
    cdef HeapItem item, top
    cdef Py_ssize_t i, parent, child
    cdef long long u, h, a, k
    cdef double d, rc, nd, pi_u

    dist[source] = 0.0
    item.dist = 0.0
    item.node = source
    heap[0] = item
    size = 1

    try:
        while size > 0:
            # pop min
            top = heap[0]
            size -= 1
            if size > 0:
                item = heap[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    if child + 1 < size and _less(heap[child + 1], heap[child]):
                        child += 1
                    if _less(heap[child], item):
                        heap[i] = heap[child]
                        i = child
                    else:
                        break
                heap[i] = item

            u = top.node
            if settled[u]:
                continue
            settled[u] = 1
            d = top.dist
            pi_u = potential[u]

            for k in range(indptr[u], indptr[u + 1]):
                a = csr_arcs[k]
                if residual[a] <= eps:
                    continue
                h = heads[a]
                if settled[h]:
                    continue
                rc = costs[a] - pi_u + potential[h]
                if rc < 0.0:
                    if rc < -NEG_TOL:
                        raise InternalInvariantError(
                            f"negative reduced cost {rc} on arc {a}"
                        )
                    rc = 0.0
                nd = d + rc
                if nd < dist[h]:
                    dist[h] = nd
                    pred_arc[h] = a
                    # push (nd, h)
                    if size == cap:
                        cap *= 2
                        heap = <HeapItem*> PyMem_Realloc(heap, cap * sizeof(HeapItem))
                        if heap == NULL:
                            raise MemoryError()
                    i = size
                    size += 1
                    item.dist = nd
                    item.node = h
                    while i > 0:
                        parent = (i - 1) // 2
                        if _less(item, heap[parent]):
                            heap[i] = heap[parent]
                            i = parent
                        else:
                            break
                    heap[i] = item
    finally:
        PyMem_Free(heap)

    return dist_arr, pred_arr
