"""Knowledge graph storage: an undirected labeled multigraph over interned ids.

Triples are loaded from TSV or an N-Triples subset, object literals are
dropped, and the result is indexed for fast neighbor/degree queries. The
graph is immutable after load and safe to share across concurrent claim
evaluations; per-claim edge hiding goes through :class:`GraphMask`.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import FactflowError, GraphFormatError, UnknownEntityError

_NT_IRI = re.compile(r"<([^<>\s]*)>")
_NT_LITERAL = re.compile(r'^"(?:[^"\\]|\\.)*"(?:\^\^<[^<>\s]*>|@[A-Za-z0-9\-]+)?$')


@dataclass(frozen=True)
class ClaimTriple:
    """A (subject, predicate, object) statement to score, as interned ids."""

    subject: int
    predicate: int
    object: int

    def __post_init__(self):
        if self.subject == self.object:
            raise ValueError("claim subject and object must differ")


@dataclass(frozen=True)
class GraphMask:
    """Edge ids hidden from traversal during one claim evaluation.

    Masking is non-destructive: the graph itself never changes.
    """

    excluded: frozenset[int] = frozenset()

    def __contains__(self, edge_id: int) -> bool:
        return edge_id in self.excluded

    def __len__(self) -> int:
        return len(self.excluded)


EMPTY_MASK = GraphMask()


@dataclass
class LoadStats:
    """Counters reported by the loaders for dropped input records."""

    literal_objects: int = 0
    duplicate_triples: int = 0
    self_loops: int = 0
    comment_lines: int = 0


class KnowledgeGraph:
    """Undirected labeled multigraph with dense integer ids.

    Duplicate (s, p, o) triples collapse to a single edge; parallel edges
    with different predicates (or opposite stored orientation) are kept.
    Edge records retain their stored orientation (a=subject, b=object) so
    traversal direction can be reported even though queries are undirected.
    """

    def __init__(self):
        self.node_labels: list[str] = []
        self.relation_labels: list[str] = []
        self._node_ids: dict[str, int] = {}
        self._relation_ids: dict[str, int] = {}
        # edge id -> (a, b, relation), stored orientation
        self.edges: list[tuple[int, int, int]] = []
        self._incidence: list[list[int]] = []
        self._degree: list[int] = []
        self.load_stats = LoadStats()
        self._frozen = False

    # -- construction ------------------------------------------------

    def _intern_node(self, label: str) -> int:
        nid = self._node_ids.get(label)
        if nid is None:
            nid = len(self.node_labels)
            self._node_ids[label] = nid
            self.node_labels.append(label)
            self._incidence.append([])
            self._degree.append(0)
        return nid

    def _intern_relation(self, label: str) -> int:
        rid = self._relation_ids.get(label)
        if rid is None:
            rid = len(self.relation_labels)
            self._relation_ids[label] = rid
            self.relation_labels.append(label)
        return rid

    def _add_triple(self, s: str, p: str, o: str, seen: set) -> None:
        if s == o:
            self.load_stats.self_loops += 1
            return
        key = (s, p, o)
        if key in seen:
            self.load_stats.duplicate_triples += 1
            return
        seen.add(key)
        a = self._intern_node(s)
        b = self._intern_node(o)
        r = self._intern_relation(p)
        eid = len(self.edges)
        self.edges.append((a, b, r))
        self._incidence[a].append(eid)
        self._incidence[b].append(eid)
        self._degree[a] += 1
        self._degree[b] += 1

    # -- basic queries -----------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_relations(self) -> int:
        return len(self.relation_labels)

    def node_id(self, label: str) -> int:
        try:
            return self._node_ids[label]
        except KeyError:
            raise UnknownEntityError(f"unknown entity: {label!r}") from None

    def relation_id(self, label: str) -> int:
        try:
            return self._relation_ids[label]
        except KeyError:
            raise UnknownEntityError(f"unknown relation: {label!r}") from None

    def has_node(self, label: str) -> bool:
        return label in self._node_ids

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.num_nodes:
            raise UnknownEntityError(f"unknown node id: {v}")

    def degree(self, v: int) -> int:
        """Number of edge records incident to v (a static property of the KG;

        per-claim masking does not change it)."""
        self._check_node(v)
        return self._degree[v]

    def neighbors(
        self, v: int, mask: GraphMask = EMPTY_MASK
    ) -> Iterator[tuple[int, int, int]]:
        """Yield (edge_id, relation_id, other_endpoint) for each unmasked
        incident edge, in ascending edge-id order."""
        self._check_node(v)
        for eid in self._incidence[v]:
            if eid in mask:
                continue
            a, b, r = self.edges[eid]
            yield eid, r, (b if a == v else a)

    def claim(self, subject: str, predicate: str, object: str) -> ClaimTriple:
        """Resolve labels to a ClaimTriple, raising on unknown ids."""
        return ClaimTriple(
            self.node_id(subject), self.relation_id(predicate), self.node_id(object)
        )

    def claim_labels(self, c: ClaimTriple) -> tuple[str, str, str]:
        return (
            self.node_labels[c.subject],
            self.relation_labels[c.predicate],
            self.node_labels[c.object],
        )

    def mask_claim_edges(self, c: ClaimTriple) -> GraphMask:
        """Mask every edge between the claim's endpoints carrying its
        predicate, in either stored orientation.

        Always applied during scoring so an in-graph claim cannot prove
        itself with its own edge.
        """
        ends = {c.subject, c.object}
        hidden = frozenset(
            eid
            for eid in self._incidence[c.subject]
            if self.edges[eid][2] == c.predicate
            and {self.edges[eid][0], self.edges[eid][1]} == ends
        )
        return GraphMask(hidden)

    # -- serialization -----------------------------------------------

    def write_tsv(self, path) -> None:
        """Write the edge multiset as canonical TSV triples (stored orientation)."""
        with open(path, "w", encoding="utf-8") as fh:
            for a, b, r in self.edges:
                fh.write(
                    f"{self.node_labels[a]}\t{self.relation_labels[r]}\t{self.node_labels[b]}\n"
                )

    def dump_canonical(self, directory) -> None:
        """Write nodes.tsv (id, label), relations.tsv (id, label) and
        edges.tsv (edge-id, a, b, rel) into `directory`."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / "nodes.tsv", "w", encoding="utf-8") as fh:
            for i, label in enumerate(self.node_labels):
                fh.write(f"{i}\t{label}\n")
        with open(directory / "relations.tsv", "w", encoding="utf-8") as fh:
            fh.write(self.relations_tsv())
        with open(directory / "edges.tsv", "w", encoding="utf-8") as fh:
            for eid, (a, b, r) in enumerate(self.edges):
                fh.write(f"{eid}\t{a}\t{b}\t{r}\n")

    def relations_tsv(self) -> str:
        return "".join(f"{i}\t{lb}\n" for i, lb in enumerate(self.relation_labels))

    def relations_checksum(self) -> bytes:
        """SHA-256 of the canonical relations table; used by the similarity
        cache to detect a changed graph."""
        return hashlib.sha256(self.relations_tsv().encode("utf-8")).digest()


def _iter_lines(source) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from enumerate(fh, start=1)
    else:
        yield from enumerate(source, start=1)


def _parse_tsv(lines: Iterable[tuple[int, str]], g: KnowledgeGraph, seen: set):
    for line_no, raw in lines:
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            g.load_stats.comment_lines += 1
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise GraphFormatError(
                line_no, f"expected 3 tab-separated fields, got {len(fields)}"
            )
        s, p, o = (f.strip() for f in fields)
        if not (s and p and o):
            raise GraphFormatError(line_no, "empty field in triple")
        if o.startswith('"'):
            g.load_stats.literal_objects += 1
            continue
        g._add_triple(s, p, o, seen)


def _parse_ntriples(lines: Iterable[tuple[int, str]], g: KnowledgeGraph, seen: set):
    for line_no, raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            g.load_stats.comment_lines += 1
            continue
        if not line.endswith("."):
            raise GraphFormatError(line_no, "statement does not end with '.'")
        body = line[:-1].strip()
        m_s = _NT_IRI.match(body)
        if not m_s:
            raise GraphFormatError(line_no, "subject is not an IRI")
        rest = body[m_s.end() :].lstrip()
        m_p = _NT_IRI.match(rest)
        if not m_p:
            raise GraphFormatError(line_no, "predicate is not an IRI")
        obj = rest[m_p.end() :].strip()
        if not obj:
            raise GraphFormatError(line_no, "missing object term")
        if obj.startswith('"'):
            if not _NT_LITERAL.match(obj):
                raise GraphFormatError(line_no, "malformed literal object")
            g.load_stats.literal_objects += 1
            continue
        m_o = _NT_IRI.fullmatch(obj)
        if not m_o:
            raise GraphFormatError(line_no, "object is neither an IRI nor a literal")
        g._add_triple(m_s.group(1), m_p.group(1), m_o.group(1), seen)


def _load_into(g: KnowledgeGraph, seen: set, source, format: str) -> None:
    if format == "tsv":
        _parse_tsv(_iter_lines(source), g, seen)
    elif format in ("nt", "ntriples", "ntriples-subset"):
        _parse_ntriples(_iter_lines(source), g, seen)
    else:
        raise ValueError(f"unknown format: {format!r}")


def load_graph(source, format: str = "tsv") -> KnowledgeGraph:
    """Load a knowledge graph from triple text.

    `source` is a path or an iterable of lines; `format` is "tsv"
    (subject<TAB>predicate<TAB>object, '#' comments ignored) or "nt"
    (an N-Triples subset: `<iri> <iri> <iri> .`). Triples whose object is
    a literal are dropped and counted in `load_stats`, as are duplicate
    triples and self-loops. Raises GraphFormatError with the offending
    line number, or FactflowError if no edges survive.
    """
    g = KnowledgeGraph()
    _load_into(g, set(), source, format)
    if g.num_edges == 0:
        raise FactflowError("no usable triples: the loaded graph is empty")
    g._frozen = True
    return g


def load_graph_files(paths, format: str = "tsv") -> KnowledgeGraph:
    """Merge several triple files into a single graph (shared id space)."""
    g = KnowledgeGraph()
    seen: set = set()
    for path in paths:
        _load_into(g, seen, path, format)
    if g.num_edges == 0:
        raise FactflowError("no usable triples: the loaded graph is empty")
    g._frozen = True
    return g
