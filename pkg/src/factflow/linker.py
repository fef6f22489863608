"""Single best-path claim scorers.

`kl_score` rates a claim by the most specific simple path between its
endpoints: the one minimizing the summed log-degrees of intermediate
nodes. `kl_rel_score` additionally biases the search toward edges whose
labels are similar to the claim predicate, dividing each intermediate
node's log-degree by the similarity of the edge entering it and charging
the last hop 1/similarity so the object's own generality is not penalized.

Both searches are label-setting over non-negative additive costs, so the
returned path is exactly optimal. The claim's own edges are masked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .errors import UnknownEntityError
from .flow import EvidencePath, path_specificity
from .graph import ClaimTriple, KnowledgeGraph
from .relsim import SimilarityModel


@dataclass
class LinkerResult:
    """Best path and its score; score is 0 with no path when the endpoints
    are not connected (by positive-similarity edges, for the relational
    variant)."""

    score: float
    path: EvidencePath | None
    variant: str


def _check_claim(graph: KnowledgeGraph, claim: ClaimTriple) -> None:
    for v in (claim.subject, claim.object):
        if not 0 <= v < graph.num_nodes:
            raise UnknownEntityError(f"claim node {v} not in graph")
    if not 0 <= claim.predicate < graph.num_relations:
        raise UnknownEntityError(f"claim predicate {claim.predicate} not in graph")


def _best_path(graph, claim, arc_cost):
    """Dijkstra over nodes with per-arc cost arc_cost(edge_id, rel, head).

    Ties resolve to fewer hops, then smaller node/edge ids, making the
    returned path deterministic. Returns (cost, [(edge_id, rel, node), ...])
    or (inf, None).
    """
    s, t = claim.subject, claim.object
    mask = graph.mask_claim_edges(claim)
    settled = set()
    pred: dict[int, tuple[int, int, int]] = {}
    # heap entries: (cost, hops, node, pred_node, pred_edge, pred_rel)
    heap = [(0.0, 0, s, -1, -1, -1)]
    while heap:
        cost, hops, v, pv, pe, pr = heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        if v != s:
            pred[v] = (pv, pe, pr)
        if v == t:
            break
        for eid, rel, w in graph.neighbors(v, mask):
            if w in settled:
                continue
            step = arc_cost(eid, rel, w)
            if step is None:
                continue
            heappush(heap, (cost + step, hops + 1, w, v, eid, rel))
    if t not in settled:
        return math.inf, None
    chain = []
    v = t
    while v != s:
        pv, pe, pr = pred[v]
        chain.append((pe, pr, v))
        v = pv
    chain.reverse()
    return cost, chain


def _to_evidence(graph, s, chain, specificity):
    nodes = [s] + [v for _e, _r, v in chain]
    edges = []
    for eid, rel, v in chain:
        a = graph.edges[eid][0]
        # entered v: stored orientation a->b is "forward" when v == b
        edges.append((eid, rel, "inverse" if a == v else "forward"))
    return EvidencePath(nodes=nodes, edges=edges, specificity=specificity)


def kl_score(graph: KnowledgeGraph, claim: ClaimTriple) -> LinkerResult:
    """Most-specific-path score: 1 / (1 + sum of intermediate log-degrees).

    A direct edge scores exactly 1.0 regardless of label.
    """
    _check_claim(graph, claim)
    t = claim.object

    def cost(_eid, _rel, head):
        return 0.0 if head == t else math.log(graph.degree(head))

    total, chain = _best_path(graph, claim, cost)
    if chain is None:
        return LinkerResult(0.0, None, "kl")
    path = _to_evidence(graph, claim.subject, chain, 1.0 / (1.0 + total))
    return LinkerResult(path.specificity, path, "kl")


def kl_rel_score(
    graph: KnowledgeGraph, model: SimilarityModel, claim: ClaimTriple
) -> LinkerResult:
    """Relationally biased best-path score.

    Minimizes sum of log k(v)/u(incoming label, p) over intermediates plus
    1/u(last label, p) for the final hop; the score is the reciprocal.
    Edges with zero similarity to p are untraversable.
    """
    _check_claim(graph, claim)
    t = claim.object
    p = claim.predicate

    def cost(_eid, rel, head):
        u = model.similarity(rel, p)
        if u <= 0.0:
            return None
        if head == t:
            return 1.0 / u
        return math.log(graph.degree(head)) / u

    total, chain = _best_path(graph, claim, cost)
    if chain is None:
        return LinkerResult(0.0, None, "kl-rel")
    nodes = [claim.subject] + [v for _e, _r, v in chain]
    path = _to_evidence(
        graph, claim.subject, chain, path_specificity(graph, nodes)
    )
    return LinkerResult(1.0 / total, path, "kl-rel")
