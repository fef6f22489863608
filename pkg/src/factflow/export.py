"""Evidence serialization: JSON documents and DOT graphs.

Every scoring mode emits the same JSON shape; single-path and structural
scorers leave the flow-specific fields null. DOT output draws the union of
evidence paths with edge thickness proportional to the net flow they carry.
"""

from __future__ import annotations

import json

from .flow import EvidencePath, Stream
from .graph import ClaimTriple, KnowledgeGraph


def _path_document(graph: KnowledgeGraph, path: EvidencePath) -> dict:
    return {
        "nodes": [graph.node_labels[v] for v in path.nodes],
        "relations": [graph.relation_labels[r] for _e, r, _d in path.edges],
        "directions": [d for _e, _r, d in path.edges],
        "beta": path.bottleneck,
        "specificity": path.specificity,
        "w": path.net_flow,
    }


def evidence_document(
    graph: KnowledgeGraph,
    claim: ClaimTriple,
    method: str,
    score: float,
    stream: Stream | None = None,
    path: EvidencePath | None = None,
) -> dict:
    s, p, o = graph.claim_labels(claim)
    paths = []
    gamma = None
    if stream is not None:
        gamma = stream.total_flow
        paths = [_path_document(graph, q) for q in stream.paths]
    elif path is not None:
        paths = [_path_document(graph, path)]
    return {
        "claim": {"subject": s, "predicate": p, "object": o},
        "method": method,
        "gamma": gamma,
        "tau": score,
        "paths": paths,
    }


def to_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    graph: KnowledgeGraph,
    claim: ClaimTriple,
    paths: list[EvidencePath],
    max_penwidth: float = 5.0,
) -> str:
    """Render evidence paths as a DOT digraph in stored edge orientation.

    Each edge is drawn once; its weight is the summed net flow of the paths
    it participates in (specificity for flowless paths), mapped linearly to
    pen width.
    """
    weight_by_edge: dict[int, float] = {}
    node_order: list[int] = []
    seen_nodes: set[int] = set()
    for path in paths:
        w = path.net_flow if path.net_flow is not None else path.specificity
        for eid, _rel, _d in path.edges:
            weight_by_edge[eid] = weight_by_edge.get(eid, 0.0) + w
        for v in path.nodes:
            if v not in seen_nodes:
                seen_nodes.add(v)
                node_order.append(v)
    for v in (claim.subject, claim.object):
        if v not in seen_nodes:
            seen_nodes.add(v)
            node_order.append(v)
    top = max(weight_by_edge.values(), default=1.0)
    lines = ["digraph evidence {", "  rankdir=LR;"]
    for v in node_order:
        attrs = [f"label={_quote(graph.node_labels[v])}"]
        if v in (claim.subject, claim.object):
            attrs.append("shape=box")
            attrs.append("style=bold")
        lines.append(f"  n{v} [{', '.join(attrs)}];")
    for eid in weight_by_edge:
        a, b, r = graph.edges[eid]
        width = 0.5 + (max_penwidth - 0.5) * (weight_by_edge[eid] / top if top else 0)
        lines.append(
            f"  n{a} -> n{b} [label={_quote(graph.relation_labels[r])},"
            f" penwidth={width:.3f}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_tsv(graph: KnowledgeGraph, claim: ClaimTriple, method: str, score: float) -> str:
    s, p, o = graph.claim_labels(claim)
    return f"{s}\t{p}\t{o}\t{method}\t{score:.9g}\n"
