"""Predicate-blind link-prediction scorers used as comparison methods.

All four look only at graph structure around the claim endpoints. They
honor the same claim-edge mask as the main scorers for leakage parity;
degrees stay static properties of the background graph.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .graph import EMPTY_MASK, GraphMask, KnowledgeGraph


def _neighbor_set(graph, v, mask):
    return {w for _eid, _rel, w in graph.neighbors(v, mask)}


def katz(
    graph: KnowledgeGraph,
    s: int,
    o: int,
    beta: float = 0.05,
    max_len: int = 3,
    mask: GraphMask = EMPTY_MASK,
) -> float:
    """Truncated Katz index: sum over l <= max_len of beta^l * (number of
    length-l walks between s and o), counting parallel edges separately.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    counts = {s: 1.0}
    score = 0.0
    weight = 1.0
    for _l in range(max_len):
        weight *= beta
        nxt: dict[int, float] = defaultdict(float)
        for v, c in counts.items():
            for _eid, _rel, w in graph.neighbors(v, mask):
                nxt[w] += c
        score += weight * nxt.get(o, 0.0)
        counts = nxt
    return score


def adamic_adar(
    graph: KnowledgeGraph, s: int, o: int, mask: GraphMask = EMPTY_MASK
) -> float:
    """Sum of 1/log(degree) over common neighbors. A common neighbor always
    has degree >= 2, so the log never vanishes."""
    common = _neighbor_set(graph, s, mask) & _neighbor_set(graph, o, mask)
    return sum(1.0 / math.log(graph.degree(z)) for z in common)


def jaccard(
    graph: KnowledgeGraph, s: int, o: int, mask: GraphMask = EMPTY_MASK
) -> float:
    """Neighborhood overlap |N(s) & N(o)| / |N(s) | N(o)|; 0 on empty union."""
    ns = _neighbor_set(graph, s, mask)
    no = _neighbor_set(graph, o, mask)
    union = ns | no
    if not union:
        return 0.0
    return len(ns & no) / len(union)


def degree_product(graph: KnowledgeGraph, s: int, o: int) -> float:
    """Product of the two static endpoint degrees."""
    return float(graph.degree(s) * graph.degree(o))
