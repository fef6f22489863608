"""Relational similarity from predicate co-occurrence.

Two relations are similar when they tend to label edges incident on the
same nodes. The co-occurrence counts are the edge weights of the graph
obtained by building the line graph of the KG and contracting same-label
nodes; TF-IDF re-weighting then damps the most common relations, and
similarity is the cosine between weighted rows.

Natural logarithms are used throughout.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FactflowError, UnknownEntityError
from .graph import KnowledgeGraph

_CACHE_MAGIC = b"FFRS"
_CACHE_VERSION = 1


def build_cooccurrence(graph: KnowledgeGraph) -> np.ndarray:
    """Count, for every relation pair, the edge pairs that share an endpoint.

    Entry (i, j) is the number of unordered pairs of distinct edges with
    labels {r_i, r_j} incident on a common node. A pair of parallel edges
    shares both endpoints but is still one pair. Two same-label edges at a
    node count toward the diagonal.
    """
    R = graph.num_relations
    C = np.zeros((R, R), dtype=np.int64)
    for v in range(graph.num_nodes):
        counts: dict[int, int] = {}
        for _eid, r, _w in graph.neighbors(v):
            counts[r] = counts.get(r, 0) + 1
        rels = sorted(counts)
        for i, ri in enumerate(rels):
            ci = counts[ri]
            C[ri, ri] += ci * (ci - 1) // 2
            for rj in rels[i + 1 :]:
                C[ri, rj] += ci * counts[rj]
                C[rj, ri] += ci * counts[rj]
    # Parallel edges were counted once per shared endpoint; keep one.
    groups: dict[tuple[int, int], list[int]] = {}
    for a, b, r in graph.edges:
        groups.setdefault((min(a, b), max(a, b)), []).append(r)
    for rels_here in groups.values():
        if len(rels_here) < 2:
            continue
        for i, ri in enumerate(rels_here):
            for rj in rels_here[i + 1 :]:
                if ri == rj:
                    C[ri, ri] -= 1
                else:
                    C[ri, rj] -= 1
                    C[rj, ri] -= 1
    return C


def tfidf_transform(counts: np.ndarray) -> np.ndarray:
    """Re-weight raw co-occurrence counts: log(1 + count) scaled per column
    by log(R / support). Columns with empty or full support come out zero."""
    R = counts.shape[0]
    support = (counts > 0).sum(axis=0)
    idf = np.zeros(R, dtype=np.float64)
    nz = support > 0
    idf[nz] = np.log(R / support[nz])
    return np.log1p(counts) * idf[np.newaxis, :]


@dataclass
class SimilarityModel:
    """Pairwise relational similarity served from TF-IDF-weighted rows.

    Immutable once built; pair lookups are memoized, so share one instance
    per thread or pre-materialize with `full_matrix()` before fanning out.
    """

    weighted: np.ndarray
    relation_labels: list[str]
    counts: np.ndarray | None = None
    row_norms: np.ndarray = field(init=False)
    _pair_cache: dict = field(init=False, default_factory=dict, repr=False)

    def __post_init__(self):
        self.row_norms = np.linalg.norm(self.weighted, axis=1)

    @property
    def num_relations(self) -> int:
        return len(self.relation_labels)

    def _check(self, r: int) -> None:
        if not 0 <= r < self.num_relations:
            raise UnknownEntityError(f"unknown relation id: {r}")

    def similarity(self, r_i: int, r_j: int) -> float:
        """Cosine of the weighted rows, in [0, 1]. Zero if either row is
        all-zero; exactly 1 for a relation with itself (nonzero row)."""
        self._check(r_i)
        self._check(r_j)
        if r_i == r_j:
            return 1.0 if self.row_norms[r_i] > 0 else 0.0
        key = (r_i, r_j) if r_i < r_j else (r_j, r_i)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        denom = self.row_norms[r_i] * self.row_norms[r_j]
        value = 0.0
        if denom > 0:
            value = float(np.dot(self.weighted[r_i], self.weighted[r_j]) / denom)
        self._pair_cache[key] = value
        return value

    def top_k_similar(self, r: int, k: int) -> list[tuple[int, float]]:
        """The k most similar other relations, ties broken by ascending id."""
        self._check(r)
        if k < 1:
            raise ValueError("k must be >= 1")
        scored = [
            (other, self.similarity(r, other))
            for other in range(self.num_relations)
            if other != r
        ]
        scored.sort(key=lambda t: (-t[1], t[0]))
        return scored[:k]

    def full_matrix(self) -> np.ndarray:
        """Materialize the full similarity table (small: R x R)."""
        sims = np.zeros((self.num_relations, self.num_relations))
        for i in range(self.num_relations):
            for j in range(i, self.num_relations):
                sims[i, j] = sims[j, i] = self.similarity(i, j)
        return sims

    def nonzero_pairs(self) -> int:
        """Number of unordered relation pairs with positive co-occurrence."""
        src = self.counts if self.counts is not None else self.weighted
        nz = np.count_nonzero(src)
        diag = np.count_nonzero(np.diagonal(src))
        return (nz - diag) // 2 + diag


def build_model(graph: KnowledgeGraph) -> SimilarityModel:
    counts = build_cooccurrence(graph)
    return SimilarityModel(
        weighted=tfidf_transform(counts),
        relation_labels=list(graph.relation_labels),
        counts=counts,
    )


# -- cache file ------------------------------------------------------
#
# Layout: magic, version, R (uint32 LE), sha256 of the canonical relation
# table, then R*R row-major float64 weighted values.


def save_model(model: SimilarityModel, path, graph: KnowledgeGraph) -> None:
    R = model.num_relations
    header = _CACHE_MAGIC + struct.pack("<II", _CACHE_VERSION, R)
    header += graph.relations_checksum()
    body = np.ascontiguousarray(model.weighted, dtype=np.float64).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def load_model(path, graph: KnowledgeGraph) -> SimilarityModel | None:
    """Read a cached model; returns None when the cache does not match the
    current graph's relation table (caller should rebuild)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    head_len = len(_CACHE_MAGIC) + 8 + 32
    if len(blob) < head_len or blob[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
        raise FactflowError(f"not a similarity cache: {path}")
    version, R = struct.unpack_from("<II", blob, len(_CACHE_MAGIC))
    if version != _CACHE_VERSION:
        raise FactflowError(f"unsupported cache version {version} in {path}")
    checksum = blob[len(_CACHE_MAGIC) + 8 : head_len]
    if checksum != graph.relations_checksum() or R != graph.num_relations:
        return None
    expected = head_len + 8 * R * R
    if len(blob) != expected:
        raise FactflowError(f"truncated similarity cache: {path}")
    weighted = np.frombuffer(blob[head_len:], dtype=np.float64).reshape(R, R).copy()
    return SimilarityModel(
        weighted=weighted, relation_labels=list(graph.relation_labels)
    )
