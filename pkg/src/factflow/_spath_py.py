"""Pure-Python shortest-path kernel (fallback when the extension is absent).

Same contract as the compiled version in `_spath.pyx`; see `_kernel`.
"""

from __future__ import annotations

from heapq import heappop, heappush

import numpy as np

from .errors import InternalInvariantError

_NEG_TOL = 1e-9

IMPLEMENTATION = "python"


def dijkstra_residual(indptr, csr_arcs, heads, costs, residual, potential, source, eps):
    """Label-setting search over residual arcs under reduced costs.

    Arcs are laid out CSR-style: slot ids for the arcs leaving node u sit in
    csr_arcs[indptr[u]:indptr[u+1]], ascending. Arcs with residual <= eps
    are treated as saturated. Heap ties break on (distance, node id).

    Returns (dist, pred_arc) where pred_arc[v] is the arc slot entering v on
    the shortest path (-1 for the source and unreached nodes). A reduced
    cost below -1e-9 means the caller's potentials are stale and raises
    InternalInvariantError.
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pred_arc = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
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
                if rc < -_NEG_TOL:
                    raise InternalInvariantError(
                        f"negative reduced cost {rc} on arc {a}"
                    )
                rc = 0.0
            nd = d + rc
            if nd < dist[h]:
                dist[h] = nd
                pred_arc[h] = a
                heappush(heap, (nd, h))
    return dist, pred_arc
