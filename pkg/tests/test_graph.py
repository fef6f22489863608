"""Graph store: loading, filtering, indexing, masking, serialization."""

import random

import pytest

from factflow import (
    ClaimTriple,
    FactflowError,
    GraphFormatError,
    GraphMask,
    UnknownEntityError,
    load_graph,
    load_graph_files,
)
from conftest import random_graph


class TestLoadTsv:
    def test_literal_objects_dropped(self):
        lines = [
            "a\tp\tb",
            "b\tq\tc",
            "c\tp\td",
            'a\tname\t"Literal Label"',
        ]
        g = load_graph(lines)
        assert g.num_edges == 3
        assert g.num_nodes <= 6
        assert g.load_stats.literal_objects == 1
        assert not g.has_node('"Literal Label"')

    def test_toy_shape(self, toy_graph):
        assert toy_graph.num_nodes == 5
        assert toy_graph.num_edges == 5
        assert toy_graph.num_relations == 4

    def test_duplicate_triples_collapse(self):
        g = load_graph(["a\tp\tb", "a\tp\tb", "a\tq\tb"])
        assert g.num_edges == 2
        assert g.load_stats.duplicate_triples == 1
        assert g.degree(g.node_id("a")) == 2

    def test_reversed_orientation_is_not_a_duplicate(self):
        g = load_graph(["a\tp\tb", "b\tp\ta"])
        assert g.num_edges == 2

    def test_self_loops_dropped(self):
        g = load_graph(["a\tp\ta", "a\tp\tb"])
        assert g.num_edges == 1
        assert g.load_stats.self_loops == 1

    def test_comments_and_blank_lines(self):
        g = load_graph(["# header", "", "a\tp\tb"])
        assert g.num_edges == 1
        assert g.load_stats.comment_lines == 1

    def test_malformed_row_carries_line_number(self):
        with pytest.raises(GraphFormatError) as err:
            load_graph(["a\tp\tb", "too\tfew"])
        assert err.value.line_no == 2

    def test_empty_graph_is_an_error(self):
        with pytest.raises(FactflowError):
            load_graph(['a\tp\t"lit"'])

    def test_merge_files(self, tmp_path):
        f1 = tmp_path / "g1.tsv"
        f2 = tmp_path / "g2.tsv"
        f1.write_text("a\tp\tb\n")
        f2.write_text("b\tq\tc\na\tp\tb\n")
        g = load_graph_files([f1, f2])
        assert g.num_edges == 2
        assert g.load_stats.duplicate_triples == 1


class TestLoadNtriples:
    def test_basic(self):
        lines = [
            "<http://x/a> <http://x/p> <http://x/b> .",
            '<http://x/a> <http://x/q> "literal" .',
            '<http://x/a> <http://x/q> "typed"^^<http://t> .',
            '<http://x/a> <http://x/q> "tagged"@en .',
            "<http://x/b> <http://x/q> <http://x/c> .",
        ]
        g = load_graph(lines, format="nt")
        assert g.num_edges == 2
        assert g.load_stats.literal_objects == 3

    @pytest.mark.parametrize(
        "bad",
        [
            "<http://x/a> <http://x/p> <http://x/b>",  # missing dot
            "nota-iri <http://x/p> <http://x/b> .",
            "<http://x/a> <http://x/p> bare .",
        ],
    )
    def test_malformed(self, bad):
        with pytest.raises(GraphFormatError):
            load_graph(["<http://x/a> <http://x/p> <http://x/b> .", bad], format="nt")


class TestDegree:
    def test_isolated_node(self):
        g = load_graph(["a\tp\tb"])
        lonely = g._intern_node("z")
        assert g.degree(lonely) == 0

    def test_three_incident_edges(self):
        g = load_graph(["a\tp\tb", "a\tq\tc", "a\tp\td"])
        assert g.degree(g.node_id("a")) == 3

    def test_toy_degrees_by_hand(self, toy_graph):
        assert toy_graph.degree(toy_graph.node_id("c")) == 2
        assert toy_graph.degree(toy_graph.node_id("b")) == 3
        assert toy_graph.degree(toy_graph.node_id("a")) == 1

    def test_unknown_node(self, toy_graph):
        with pytest.raises(UnknownEntityError):
            toy_graph.degree(99)

    def test_degree_matches_edge_scan(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_graph(rng)
            for v in range(g.num_nodes):
                scanned = sum(1 for a, b, _r in g.edges if v in (a, b))
                assert g.degree(v) == scanned

    def test_handshake(self):
        rng = random.Random(12)
        for _ in range(25):
            g = random_graph(rng)
            assert sum(g.degree(v) for v in range(g.num_nodes)) == 2 * g.num_edges


class TestNeighbors:
    def test_empty_mask_yields_all(self, toy_graph):
        b = toy_graph.node_id("b")
        got = list(toy_graph.neighbors(b))
        assert len(got) == 3
        assert [eid for eid, _r, _w in got] == sorted(eid for eid, _r, _w in got)

    def test_mask_hides_edge(self, toy_graph):
        b = toy_graph.node_id("b")
        eid = next(iter(toy_graph.neighbors(b)))[0]
        got = list(toy_graph.neighbors(b, GraphMask(frozenset({eid}))))
        assert eid not in [e for e, _r, _w in got]
        assert len(got) == 2

    def test_parallel_edges_are_distinct_records(self):
        g = load_graph(["a\tp1\tb", "a\tp2\tb"])
        got = list(g.neighbors(g.node_id("a")))
        assert len(got) == 2
        assert {g.relation_labels[r] for _e, r, _w in got} == {"p1", "p2"}

    def test_each_edge_seen_twice_across_endpoints(self):
        rng = random.Random(13)
        for _ in range(20):
            g = random_graph(rng)
            count = {}
            for v in range(g.num_nodes):
                for eid, _r, _w in g.neighbors(v):
                    count[eid] = count.get(eid, 0) + 1
            assert all(c == 2 for c in count.values())
            assert len(count) == g.num_edges


class TestClaimMask:
    def test_claim_edge_present_once(self, toy_graph):
        c = toy_graph.claim("a", "A", "b")
        assert len(toy_graph.mask_claim_edges(c)) == 1

    def test_claim_edge_absent(self, toy_graph):
        c = toy_graph.claim("a", "B", "e")
        assert len(toy_graph.mask_claim_edges(c)) == 0

    def test_both_orientations_masked(self):
        g = load_graph(["a\tp\tb", "b\tp\ta", "a\tq\tb"])
        mask = g.mask_claim_edges(g.claim("a", "p", "b"))
        assert len(mask) == 2

    def test_masking_is_non_destructive(self, toy_graph):
        c = toy_graph.claim("a", "A", "b")
        before = list(toy_graph.neighbors(toy_graph.node_id("a")))
        toy_graph.mask_claim_edges(c)
        assert list(toy_graph.neighbors(toy_graph.node_id("a"))) == before


class TestClaimTriple:
    def test_same_subject_object_rejected(self):
        with pytest.raises(ValueError):
            ClaimTriple(1, 0, 1)

    def test_unknown_labels_raise(self, toy_graph):
        with pytest.raises(UnknownEntityError):
            toy_graph.claim("nope", "A", "b")
        with pytest.raises(UnknownEntityError):
            toy_graph.claim("a", "nope", "b")


class TestSerialization:
    def test_tsv_round_trip_isomorphic(self, tmp_path):
        rng = random.Random(14)
        for i in range(10):
            g = random_graph(rng)
            path = tmp_path / f"g{i}.tsv"
            g.write_tsv(path)
            g2 = load_graph(path)
            assert set(g.node_labels) == set(g2.node_labels)
            assert set(g.relation_labels) == set(g2.relation_labels)
            labeled = lambda gr: sorted(
                (gr.node_labels[a], gr.relation_labels[r], gr.node_labels[b])
                for a, b, r in gr.edges
            )
            assert labeled(g) == labeled(g2)

    def test_canonical_dump(self, toy_graph, tmp_path):
        toy_graph.dump_canonical(tmp_path)
        nodes = (tmp_path / "nodes.tsv").read_text().splitlines()
        rels = (tmp_path / "relations.tsv").read_text().splitlines()
        edges = (tmp_path / "edges.tsv").read_text().splitlines()
        assert len(nodes) == 5 and len(rels) == 4 and len(edges) == 5
        assert edges[0].split("\t")[0] == "0"
